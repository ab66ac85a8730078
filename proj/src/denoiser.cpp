#include "eitc/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace eitc {

namespace {
// Uniform He-style init for conv weights, small normal for time projections.
void init_conv(Eigen::VectorXd& theta, int off, int len, int fan_in, Rng& rng) {
    const double scale = std::sqrt(2.0 / fan_in);
    for (int i = 0; i < len; ++i) theta[off + i] = scale * rng.normal();
}
} // namespace

ConvDenoiser::ConvDenoiser(const ConvDenoiserConfig& config, const NoiseSchedule& schedule,
                           std::uint64_t init_seed)
    : cfg_(config), schedule_(schedule) {
    if (cfg_.n_side % 4 != 0)
        throw std::invalid_argument("ConvDenoiser: n_side must be divisible by 4 (two 2x poolings)");
    const int w0 = cfg_.base_width, E = cfg_.t_embed_dim;

    int cursor = 0;
    auto make_block = [&](int cin, int cout, bool temb) {
        Block b{};
        b.cin = cin;
        b.cout = cout;
        b.w_off = cursor;
        b.w_len = cout * cin * 9;
        cursor += b.w_len;
        b.b_off = cursor;
        b.b_len = cout;
        cursor += b.b_len;
        if (temb) {
            b.tw_off = cursor;
            b.tw_len = cout * E;
            cursor += b.tw_len;
            b.tb_off = cursor;
            b.tb_len = cout;
            cursor += b.tb_len;
        } else {
            b.tw_off = b.tb_off = cursor;
            b.tw_len = b.tb_len = 0;
        }
        return b;
    };
    conv_in_ = make_block(3, w0, true);
    enc1_ = make_block(w0, 2 * w0, true);
    enc2_ = make_block(2 * w0, 4 * w0, true);
    dec2_ = make_block(4 * w0, 2 * w0, true);
    dec1_ = make_block(2 * w0, w0, true);
    out_ = make_block(w0, 1, false);

    theta_ = Eigen::VectorXd::Zero(cursor);
    Rng rng(init_seed);
    for (const Block* b : {&conv_in_, &enc1_, &enc2_, &dec2_, &dec1_, &out_}) {
        init_conv(theta_, b->w_off, b->w_len, b->cin * 9, rng);
        for (int i = 0; i < b->tw_len; ++i) theta_[b->tw_off + i] = 0.01 * rng.normal();
    }
}

Eigen::VectorXd ConvDenoiser::time_embedding(int t) const {
    const int E = cfg_.t_embed_dim;
    Eigen::VectorXd e(E);
    for (int i = 0; i < E / 2; ++i) {
        const double freq = std::exp(-std::log(10000.0) * (2.0 * i / E));
        e[2 * i] = std::sin(t * freq);
        e[2 * i + 1] = std::cos(t * freq);
    }
    return e;
}

struct ConvDenoiser::Workspace {
    Eigen::VectorXd temb;
    Tensor input;                      // 3 channels at H
    Tensor pre0, h0;                   // w0 @ H
    Tensor p1, pre1, h1;               // 2w0 @ H/2
    Tensor p2, pre2, h2;               // 4w0 @ H/4
    Tensor pre_d2, d2, up2, u2;        // 2w0 @ H/4 then H/2
    Tensor pre_d1, d1, up1, u1;        // w0 @ H/2 then H
    Tensor out;                        // 1 @ H
};

void ConvDenoiser::forward(const Eigen::VectorXd& x_t, const Condition& z, int t,
                           Workspace& ws) const {
    const int H = cfg_.n_side, d = dim();
    if (int(x_t.size()) != d || int(z.observed.size()) != d || int(z.mask.size()) != d)
        throw std::invalid_argument("ConvDenoiser: input/condition shape mismatch");
    if (t < 1 || t > schedule_.T) throw std::invalid_argument("ConvDenoiser: t out of range");

    ws.temb = time_embedding(t);
    ws.input.resize(3, H, H);
    std::copy(x_t.data(), x_t.data() + d, ws.input.plane(0));
    std::copy(z.observed.data(), z.observed.data() + d, ws.input.plane(1));
    std::copy(z.mask.data(), z.mask.data() + d, ws.input.plane(2));

    const double* th = theta_.data();
    auto add_temb = [&](const Block& b, Tensor& x) {
        const int hw = x.h * x.w;
        for (int c = 0; c < b.cout; ++c) {
            double bias = th[b.tb_off + c];
            for (int i = 0; i < cfg_.t_embed_dim; ++i)
                bias += th[b.tw_off + c * cfg_.t_embed_dim + i] * ws.temb[i];
            double* p = x.plane(c);
            for (int i = 0; i < hw; ++i) p[i] += bias;
        }
    };

    conv3x3_forward(ws.input, th + conv_in_.w_off, th + conv_in_.b_off, conv_in_.cout, ws.pre0,
                    parallel_);
    add_temb(conv_in_, ws.pre0);
    ws.h0 = ws.pre0;
    silu_forward(ws.h0);

    avgpool2_forward(ws.h0, ws.p1);
    conv3x3_forward(ws.p1, th + enc1_.w_off, th + enc1_.b_off, enc1_.cout, ws.pre1, parallel_);
    add_temb(enc1_, ws.pre1);
    ws.h1 = ws.pre1;
    silu_forward(ws.h1);

    avgpool2_forward(ws.h1, ws.p2);
    conv3x3_forward(ws.p2, th + enc2_.w_off, th + enc2_.b_off, enc2_.cout, ws.pre2, parallel_);
    add_temb(enc2_, ws.pre2);
    ws.h2 = ws.pre2;
    silu_forward(ws.h2);

    conv3x3_forward(ws.h2, th + dec2_.w_off, th + dec2_.b_off, dec2_.cout, ws.pre_d2, parallel_);
    add_temb(dec2_, ws.pre_d2);
    ws.d2 = ws.pre_d2;
    silu_forward(ws.d2);
    upsample2_forward(ws.d2, ws.up2);
    ws.u2 = ws.up2;
    for (size_t i = 0; i < ws.u2.v.size(); ++i) ws.u2.v[i] += ws.h1.v[i]; // skip

    conv3x3_forward(ws.u2, th + dec1_.w_off, th + dec1_.b_off, dec1_.cout, ws.pre_d1, parallel_);
    add_temb(dec1_, ws.pre_d1);
    ws.d1 = ws.pre_d1;
    silu_forward(ws.d1);
    upsample2_forward(ws.d1, ws.up1);
    ws.u1 = ws.up1;
    for (size_t i = 0; i < ws.u1.v.size(); ++i) ws.u1.v[i] += ws.h0.v[i]; // skip

    conv3x3_forward(ws.u1, th + out_.w_off, th + out_.b_off, out_.cout, ws.out, parallel_);
}

Eigen::VectorXd ConvDenoiser::predict_clean(const Eigen::VectorXd& x_t, const Condition& z,
                                            int t) const {
    Workspace ws;
    forward(x_t, z, t, ws);
    return Eigen::Map<const Eigen::VectorXd>(ws.out.v.data(), dim());
}

Eigen::VectorXd ConvDenoiser::score(const Eigen::VectorXd& x_t, const Condition& z, int t) const {
    const double ab = schedule_.abar(t);
    const Eigen::VectorXd xhat0 = predict_clean(x_t, z, t);
    return -(x_t - std::sqrt(ab) * xhat0) / (1.0 - ab);
}

double ConvDenoiser::loss_and_grad(const Eigen::VectorXd& x_t, const Condition& z, int t,
                                   const Eigen::VectorXd& target, double weight,
                                   Eigen::VectorXd& grad) const {
    if (grad.size() != theta_.size())
        throw std::invalid_argument("ConvDenoiser: grad buffer size mismatch");
    Workspace ws;
    forward(x_t, z, t, ws);

    const int d = dim();
    const double ab = schedule_.abar(t);
    const double sab = std::sqrt(ab);
    const Eigen::Map<const Eigen::VectorXd> xhat0(ws.out.v.data(), d);
    const Eigen::VectorXd s = -(x_t - sab * xhat0) / (1.0 - ab);
    const Eigen::VectorXd diff = s - target;
    const double loss = weight * diff.squaredNorm();

    // d loss / d xhat0, then backward through the network.
    const double coeff = 2.0 * weight * sab / (1.0 - ab);
    Tensor g_out(1, cfg_.n_side, cfg_.n_side);
    for (int i = 0; i < d; ++i) g_out.v[i] = coeff * diff[i];

    const double* th = theta_.data();
    double* gp = grad.data();
    auto temb_grad = [&](const Block& b, const Tensor& gpre) {
        const int hw = gpre.h * gpre.w;
        for (int c = 0; c < b.cout; ++c) {
            const double* p = gpre.plane(c);
            double s_c = 0.0;
            for (int i = 0; i < hw; ++i) s_c += p[i];
            gp[b.tb_off + c] += s_c;
            for (int i = 0; i < cfg_.t_embed_dim; ++i)
                gp[b.tw_off + c * cfg_.t_embed_dim + i] += s_c * ws.temb[i];
        }
    };

    // out conv
    Tensor g_u1;
    conv3x3_backward(ws.u1, th + out_.w_off, out_.cout, g_out, &g_u1, gp + out_.w_off,
                     gp + out_.b_off, parallel_);

    // skip: u1 = up(d1) + h0
    Tensor g_h0_skip = g_u1;
    Tensor g_d1;
    upsample2_backward(g_u1, g_d1);
    silu_backward(ws.pre_d1, g_d1);
    temb_grad(dec1_, g_d1);
    Tensor g_u2;
    conv3x3_backward(ws.u2, th + dec1_.w_off, dec1_.cout, g_d1, &g_u2, gp + dec1_.w_off,
                     gp + dec1_.b_off, parallel_);

    // skip: u2 = up(d2) + h1
    Tensor g_h1_skip = g_u2;
    Tensor g_d2;
    upsample2_backward(g_u2, g_d2);
    silu_backward(ws.pre_d2, g_d2);
    temb_grad(dec2_, g_d2);
    Tensor g_h2;
    conv3x3_backward(ws.h2, th + dec2_.w_off, dec2_.cout, g_d2, &g_h2, gp + dec2_.w_off,
                     gp + dec2_.b_off, parallel_);

    silu_backward(ws.pre2, g_h2);
    temb_grad(enc2_, g_h2);
    Tensor g_p2;
    conv3x3_backward(ws.p2, th + enc2_.w_off, enc2_.cout, g_h2, &g_p2, gp + enc2_.w_off,
                     gp + enc2_.b_off, parallel_);

    Tensor g_h1;
    avgpool2_backward(g_p2, g_h1);
    for (size_t i = 0; i < g_h1.v.size(); ++i) g_h1.v[i] += g_h1_skip.v[i];
    silu_backward(ws.pre1, g_h1);
    temb_grad(enc1_, g_h1);
    Tensor g_p1;
    conv3x3_backward(ws.p1, th + enc1_.w_off, enc1_.cout, g_h1, &g_p1, gp + enc1_.w_off,
                     gp + enc1_.b_off, parallel_);

    Tensor g_h0;
    avgpool2_backward(g_p1, g_h0);
    for (size_t i = 0; i < g_h0.v.size(); ++i) g_h0.v[i] += g_h0_skip.v[i];
    silu_backward(ws.pre0, g_h0);
    temb_grad(conv_in_, g_h0);
    conv3x3_backward(ws.input, th + conv_in_.w_off, conv_in_.cout, g_h0, nullptr,
                     gp + conv_in_.w_off, gp + conv_in_.b_off, parallel_);

    return loss;
}

} // namespace eitc
