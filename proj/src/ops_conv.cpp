// conv2d via im2col + gemm, plus global average pooling. The im2col buffer
// is rebuilt in the backward pass instead of being cached; the gemm dominates
// either way.

#include <cstring>
#include <vector>

#include "hdiv/kernels.hpp"
#include "hdiv/ops.hpp"
#include "op_common.hpp"

namespace hdiv {

using detail::make_output;
using detail::Node;
using detail::transpose_buf;

namespace {

struct ConvDims {
    std::size_t batch, in_ch, in_h, in_w;
    std::size_t out_ch, ksize, stride, pad;
    std::size_t out_h, out_w;
    std::size_t patch() const { return in_ch * ksize * ksize; }
    std::size_t out_hw() const { return out_h * out_w; }
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, int stride, int pad) {
    if (x.rank() != 4) fail("conv2d: input must be B×C×H×W, got " + shape_str(x.shape()));
    if (w.rank() != 4) fail("conv2d: weights must be F×C×k×k, got " + shape_str(w.shape()));
    if (w.dim(2) != w.dim(3)) fail("conv2d: non-square kernel " + shape_str(w.shape()));
    if (w.dim(1) != x.dim(1)) {
        fail("conv2d: channel mismatch " + shape_str(x.shape()) + " vs " + shape_str(w.shape()));
    }
    if (stride < 1) fail("conv2d: stride must be >= 1");
    if (pad < 0) fail("conv2d: pad must be >= 0");
    ConvDims d{};
    d.batch = static_cast<std::size_t>(x.dim(0));
    d.in_ch = static_cast<std::size_t>(x.dim(1));
    d.in_h = static_cast<std::size_t>(x.dim(2));
    d.in_w = static_cast<std::size_t>(x.dim(3));
    d.out_ch = static_cast<std::size_t>(w.dim(0));
    d.ksize = static_cast<std::size_t>(w.dim(2));
    d.stride = static_cast<std::size_t>(stride);
    d.pad = static_cast<std::size_t>(pad);
    const int64_t padded_h = x.dim(2) + 2 * pad;
    const int64_t padded_w = x.dim(3) + 2 * pad;
    if (w.dim(2) > padded_h || w.dim(2) > padded_w) {
        fail("conv2d: kernel larger than padded input");
    }
    const int64_t span_h = padded_h - w.dim(2);
    const int64_t span_w = padded_w - w.dim(2);
    if (span_h % stride != 0 || span_w % stride != 0) {
        fail("conv2d: non-integral output size for input " + shape_str(x.shape()) +
             ", kernel " + std::to_string(w.dim(2)) + ", stride " + std::to_string(stride) +
             ", pad " + std::to_string(pad));
    }
    d.out_h = static_cast<std::size_t>(span_h / stride + 1);
    d.out_w = static_cast<std::size_t>(span_w / stride + 1);
    return d;
}

// cols is (C*k*k) × (out_h*out_w), one column per output position.
void im2col(const double* img, const ConvDims& d, double* cols) {
    const std::size_t ohw = d.out_hw();
    for (std::size_t c = 0; c < d.in_ch; ++c) {
        const double* plane = img + c * d.in_h * d.in_w;
        for (std::size_t ki = 0; ki < d.ksize; ++ki) {
            for (std::size_t kj = 0; kj < d.ksize; ++kj) {
                double* row = cols + ((c * d.ksize + ki) * d.ksize + kj) * ohw;
                for (std::size_t oy = 0; oy < d.out_h; ++oy) {
                    const std::ptrdiff_t iy =
                        static_cast<std::ptrdiff_t>(oy * d.stride + ki) -
                        static_cast<std::ptrdiff_t>(d.pad);
                    double* out = row + oy * d.out_w;
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.in_h)) {
                        std::memset(out, 0, d.out_w * sizeof(double));
                        continue;
                    }
                    const double* src = plane + static_cast<std::size_t>(iy) * d.in_w;
                    for (std::size_t ox = 0; ox < d.out_w; ++ox) {
                        const std::ptrdiff_t ix =
                            static_cast<std::ptrdiff_t>(ox * d.stride + kj) -
                            static_cast<std::ptrdiff_t>(d.pad);
                        out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.in_w))
                                      ? 0.0
                                      : src[ix];
                    }
                }
            }
        }
    }
}

// Scatter-add of a (C*k*k) × (out_h*out_w) gradient back onto the image.
void col2im_add(const double* cols, const ConvDims& d, double* img) {
    for (std::size_t c = 0; c < d.in_ch; ++c) {
        double* plane = img + c * d.in_h * d.in_w;
        for (std::size_t ki = 0; ki < d.ksize; ++ki) {
            for (std::size_t kj = 0; kj < d.ksize; ++kj) {
                const double* row = cols + ((c * d.ksize + ki) * d.ksize + kj) * d.out_hw();
                for (std::size_t oy = 0; oy < d.out_h; ++oy) {
                    const std::ptrdiff_t iy =
                        static_cast<std::ptrdiff_t>(oy * d.stride + ki) -
                        static_cast<std::ptrdiff_t>(d.pad);
                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.in_h)) continue;
                    double* dst = plane + static_cast<std::size_t>(iy) * d.in_w;
                    const double* src = row + oy * d.out_w;
                    for (std::size_t ox = 0; ox < d.out_w; ++ox) {
                        const std::ptrdiff_t ix =
                            static_cast<std::ptrdiff_t>(ox * d.stride + kj) -
                            static_cast<std::ptrdiff_t>(d.pad);
                        if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.in_w)) continue;
                        dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, int stride, int pad) {
    const ConvDims d = conv_dims(x, w, stride, pad);
    const std::size_t ohw = d.out_hw();
    const std::size_t patch = d.patch();
    std::vector<double> out(d.batch * d.out_ch * ohw);
    std::vector<double> cols(patch * ohw);
    const std::size_t img_sz = d.in_ch * d.in_h * d.in_w;
    for (std::size_t b = 0; b < d.batch; ++b) {
        im2col(x.data() + b * img_sz, d, cols.data());
        kernels::gemm(w.data(), cols.data(), out.data() + b * d.out_ch * ohw, d.out_ch,
                      patch, ohw, false);
    }
    Tensor y = make_output({x.dim(0), w.dim(0), static_cast<int64_t>(d.out_h),
                            static_cast<int64_t>(d.out_w)},
                           std::move(out), {x.ptr(), w.ptr()}, "conv2d");
    if (!y.requires_grad()) return y;

    auto xn = x.ptr();
    auto wn = w.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, wn, yn, d]() {
        const std::size_t ohw = d.out_hw();
        const std::size_t patch = d.patch();
        const std::size_t img_sz = d.in_ch * d.in_h * d.in_w;
        const double* g = yn->grad.data();
        std::vector<double> cols(patch * ohw);

        if (wn->requires_grad) {
            wn->ensure_grad();
            std::vector<double> cols_t(ohw * patch);
            for (std::size_t b = 0; b < d.batch; ++b) {
                im2col(xn->values.data() + b * img_sz, d, cols.data());
                transpose_buf(cols.data(), patch, ohw, cols_t.data());
                kernels::gemm(g + b * d.out_ch * ohw, cols_t.data(), wn->grad.data(),
                              d.out_ch, ohw, patch, true);
            }
        }
        if (xn->requires_grad) {
            xn->ensure_grad();
            std::vector<double> wt(patch * d.out_ch);
            transpose_buf(wn->values.data(), d.out_ch, patch, wt.data());
            for (std::size_t b = 0; b < d.batch; ++b) {
                kernels::gemm(wt.data(), g + b * d.out_ch * ohw, cols.data(), patch,
                              d.out_ch, ohw, false);
                col2im_add(cols.data(), d, xn->grad.data() + b * img_sz);
            }
        }
    };
    return y;
}

Tensor global_avg_pool(const Tensor& x) {
    if (x.rank() != 4) fail("global_avg_pool: expected B×C×H×W, got " + shape_str(x.shape()));
    const auto b = static_cast<std::size_t>(x.dim(0));
    const auto c = static_cast<std::size_t>(x.dim(1));
    const auto hw = static_cast<std::size_t>(x.dim(2) * x.dim(3));
    if (hw == 0) fail("global_avg_pool: empty spatial dims");
    std::vector<double> out(b * c);
    const double inv = 1.0 / static_cast<double>(hw);
    for (std::size_t i = 0; i < b * c; ++i) {
        out[i] = kernels::sum(x.data() + i * hw, hw) * inv;
    }
    Tensor y = make_output({x.dim(0), x.dim(1)}, std::move(out), {x.ptr()}, "global_avg_pool");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn, b, c, hw, inv]() {
        xn->ensure_grad();
        const double* g = yn->grad.data();
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < b * c; ++i) {
            const double gv = g[i] * inv;
            double* dst = xg + i * hw;
            for (std::size_t j = 0; j < hw; ++j) dst[j] += gv;
        }
    };
    return y;
}

}  // namespace hdiv
