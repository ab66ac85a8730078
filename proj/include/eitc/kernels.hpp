// Dense kernels of the denoiser network: 3x3 same-padding convolution,
// 2x2 average pooling, nearest-neighbor upsampling and SiLU. Convolutions
// come in OpenMP and serial reference variants; both orders of floating-point
// operations per output element are identical, so results match bitwise.
#pragma once

#include <cassert>
#include <vector>

namespace eitc {

/// Channel-major (C, H, W) contiguous tensor.
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(size_t(c_) * h_ * w_, 0.0) {}

    void resize(int c_, int h_, int w_) {
        c = c_;
        h = h_;
        w = w_;
        v.assign(size_t(c_) * h_ * w_, 0.0);
    }
    double* plane(int ci) { return v.data() + size_t(ci) * h * w; }
    const double* plane(int ci) const { return v.data() + size_t(ci) * h * w; }
    size_t size() const { return v.size(); }
};

/// y[co] = b[co] + sum_ci W[co,ci,:,:] (*) x[ci], zero-padded 3x3.
/// W layout: [co][ci][ky][kx] flat.
void conv3x3_forward(const Tensor& x, const double* W, const double* b, int c_out, Tensor& y,
                     bool parallel);
void conv3x3_forward_serial(const Tensor& x, const double* W, const double* b, int c_out,
                            Tensor& y);

/// Gradients of the 3x3 convolution. dW and db are accumulated (+=); dx is
/// overwritten. Any of dx, dW, db may be null to skip.
void conv3x3_backward(const Tensor& x, const double* W, int c_out, const Tensor& dy, Tensor* dx,
                      double* dW, double* db, bool parallel);
void conv3x3_backward_serial(const Tensor& x, const double* W, int c_out, const Tensor& dy,
                             Tensor* dx, double* dW, double* db);

void avgpool2_forward(const Tensor& x, Tensor& y);
void avgpool2_backward(const Tensor& dy, Tensor& dx); // dx gets dy / 4 spread

void upsample2_forward(const Tensor& x, Tensor& y);
void upsample2_backward(const Tensor& dy, Tensor& dx); // dx gets 2x2 sums

/// In-place SiLU x * sigmoid(x); `pre` keeps the pre-activation values.
void silu_forward(Tensor& x);
/// dx = dy * silu'(pre), written in place into dy.
void silu_backward(const Tensor& pre, Tensor& dy);

} // namespace eitc
