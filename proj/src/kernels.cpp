#include "eitc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace eitc {

namespace {

// One output channel of the padded 3x3 convolution. The (ci, ky, kx) loop
// order is fixed, so serial and parallel callers accumulate identically.
void conv_one_out(const Tensor& x, const double* W, double bias, int co, Tensor& y) {
    const int H = x.h, Wd = x.w, cin = x.c;
    double* out = y.plane(co);
    std::fill(out, out + size_t(H) * Wd, bias);
    for (int ci = 0; ci < cin; ++ci) {
        const double* in = x.plane(ci);
        for (int ky = 0; ky < 3; ++ky) {
            const int oy0 = std::max(0, 1 - ky);
            const int oy1 = std::min(H - 1, H - ky); // inclusive
            for (int kx = 0; kx < 3; ++kx) {
                const double wgt = W[((size_t(co) * cin + ci) * 3 + ky) * 3 + kx];
                const int ox0 = std::max(0, 1 - kx);
                const int ox1 = std::min(Wd - 1, Wd - kx);
                for (int oy = oy0; oy <= oy1; ++oy) {
                    double* orow = out + size_t(oy) * Wd;
                    const double* irow = in + size_t(oy + ky - 1) * Wd + (kx - 1);
                    for (int ox = ox0; ox <= ox1; ++ox) orow[ox] += wgt * irow[ox];
                }
            }
        }
    }
}

// dx[ci] = sum_co W[co,ci] correlated with dy[co] (transposed kernel).
void convT_one_in(const Tensor& dy, const double* W, int c_out, int cin, int ci, Tensor& dx) {
    const int H = dx.h, Wd = dx.w;
    double* out = dx.plane(ci);
    std::fill(out, out + size_t(H) * Wd, 0.0);
    for (int co = 0; co < c_out; ++co) {
        const double* g = dy.plane(co);
        for (int ky = 0; ky < 3; ++ky) {
            const int oy0 = std::max(0, 1 - ky);
            const int oy1 = std::min(H - 1, H - ky);
            for (int kx = 0; kx < 3; ++kx) {
                const double wgt = W[((size_t(co) * cin + ci) * 3 + ky) * 3 + kx];
                const int ox0 = std::max(0, 1 - kx);
                const int ox1 = std::min(Wd - 1, Wd - kx);
                for (int oy = oy0; oy <= oy1; ++oy) {
                    const double* grow = g + size_t(oy) * Wd;
                    double* irow = out + size_t(oy + ky - 1) * Wd + (kx - 1);
                    for (int ox = ox0; ox <= ox1; ++ox) irow[ox] += wgt * grow[ox];
                }
            }
        }
    }
}

// dW[co,ci,ky,kx] += <dy[co], shifted x[ci]>, db[co] += sum dy[co].
void conv_grad_one_out(const Tensor& x, const Tensor& dy, int cin, int co, double* dW,
                       double* db) {
    const int H = x.h, Wd = x.w;
    const double* g = dy.plane(co);
    if (db) {
        double s = 0.0;
        for (size_t i = 0; i < size_t(H) * Wd; ++i) s += g[i];
        db[co] += s;
    }
    if (!dW) return;
    for (int ci = 0; ci < cin; ++ci) {
        const double* in = x.plane(ci);
        for (int ky = 0; ky < 3; ++ky) {
            const int oy0 = std::max(0, 1 - ky);
            const int oy1 = std::min(H - 1, H - ky);
            for (int kx = 0; kx < 3; ++kx) {
                const int ox0 = std::max(0, 1 - kx);
                const int ox1 = std::min(Wd - 1, Wd - kx);
                double acc = 0.0;
                for (int oy = oy0; oy <= oy1; ++oy) {
                    const double* grow = g + size_t(oy) * Wd;
                    const double* irow = in + size_t(oy + ky - 1) * Wd + (kx - 1);
                    for (int ox = ox0; ox <= ox1; ++ox) acc += grow[ox] * irow[ox];
                }
                dW[((size_t(co) * cin + ci) * 3 + ky) * 3 + kx] += acc;
            }
        }
    }
}

} // namespace

void conv3x3_forward_serial(const Tensor& x, const double* W, const double* b, int c_out,
                            Tensor& y) {
    y.resize(c_out, x.h, x.w);
    for (int co = 0; co < c_out; ++co) conv_one_out(x, W, b[co], co, y);
}

void conv3x3_forward(const Tensor& x, const double* W, const double* b, int c_out, Tensor& y,
                     bool parallel) {
    if (!parallel) {
        conv3x3_forward_serial(x, W, b, c_out, y);
        return;
    }
    y.resize(c_out, x.h, x.w);
#pragma omp parallel for schedule(static)
    for (int co = 0; co < c_out; ++co) conv_one_out(x, W, b[co], co, y);
}

void conv3x3_backward_serial(const Tensor& x, const double* W, int c_out, const Tensor& dy,
                             Tensor* dx, double* dW, double* db) {
    if (dx) {
        dx->resize(x.c, x.h, x.w);
        for (int ci = 0; ci < x.c; ++ci) convT_one_in(dy, W, c_out, x.c, ci, *dx);
    }
    if (dW || db)
        for (int co = 0; co < c_out; ++co) conv_grad_one_out(x, dy, x.c, co, dW, db);
}

void conv3x3_backward(const Tensor& x, const double* W, int c_out, const Tensor& dy, Tensor* dx,
                      double* dW, double* db, bool parallel) {
    if (!parallel) {
        conv3x3_backward_serial(x, W, c_out, dy, dx, dW, db);
        return;
    }
    if (dx) {
        dx->resize(x.c, x.h, x.w);
        const int cin = x.c;
#pragma omp parallel for schedule(static)
        for (int ci = 0; ci < cin; ++ci) convT_one_in(dy, W, c_out, cin, ci, *dx);
    }
    if (dW || db) {
#pragma omp parallel for schedule(static)
        for (int co = 0; co < c_out; ++co) conv_grad_one_out(x, dy, x.c, co, dW, db);
    }
}

void avgpool2_forward(const Tensor& x, Tensor& y) {
    y.resize(x.c, x.h / 2, x.w / 2);
    for (int c = 0; c < x.c; ++c) {
        const double* in = x.plane(c);
        double* out = y.plane(c);
        for (int oy = 0; oy < y.h; ++oy)
            for (int ox = 0; ox < y.w; ++ox) {
                const double* p = in + size_t(2 * oy) * x.w + 2 * ox;
                out[size_t(oy) * y.w + ox] = 0.25 * (p[0] + p[1] + p[x.w] + p[x.w + 1]);
            }
    }
}

void avgpool2_backward(const Tensor& dy, Tensor& dx) {
    dx.resize(dy.c, dy.h * 2, dy.w * 2);
    for (int c = 0; c < dy.c; ++c) {
        const double* g = dy.plane(c);
        double* out = dx.plane(c);
        for (int oy = 0; oy < dy.h; ++oy)
            for (int ox = 0; ox < dy.w; ++ox) {
                const double v = 0.25 * g[size_t(oy) * dy.w + ox];
                double* p = out + size_t(2 * oy) * dx.w + 2 * ox;
                p[0] = v;
                p[1] = v;
                p[dx.w] = v;
                p[dx.w + 1] = v;
            }
    }
}

void upsample2_forward(const Tensor& x, Tensor& y) {
    y.resize(x.c, x.h * 2, x.w * 2);
    for (int c = 0; c < x.c; ++c) {
        const double* in = x.plane(c);
        double* out = y.plane(c);
        for (int iy = 0; iy < x.h; ++iy)
            for (int ix = 0; ix < x.w; ++ix) {
                const double v = in[size_t(iy) * x.w + ix];
                double* p = out + size_t(2 * iy) * y.w + 2 * ix;
                p[0] = v;
                p[1] = v;
                p[y.w] = v;
                p[y.w + 1] = v;
            }
    }
}

void upsample2_backward(const Tensor& dy, Tensor& dx) {
    dx.resize(dy.c, dy.h / 2, dy.w / 2);
    for (int c = 0; c < dy.c; ++c) {
        const double* g = dy.plane(c);
        double* out = dx.plane(c);
        for (int iy = 0; iy < dx.h; ++iy)
            for (int ix = 0; ix < dx.w; ++ix) {
                const double* p = g + size_t(2 * iy) * dy.w + 2 * ix;
                out[size_t(iy) * dx.w + ix] = p[0] + p[1] + p[dy.w] + p[dy.w + 1];
            }
    }
}

void silu_forward(Tensor& x) {
    for (double& v : x.v) v = v / (1.0 + std::exp(-v));
}

void silu_backward(const Tensor& pre, Tensor& dy) {
    for (size_t i = 0; i < dy.v.size(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-pre.v[i]));
        dy.v[i] *= s * (1.0 + pre.v[i] * (1.0 - s));
    }
}

} // namespace eitc
