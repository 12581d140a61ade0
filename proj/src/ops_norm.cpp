#include <cmath>
#include <memory>
#include <vector>

#include "hdiv/ops.hpp"
#include "op_common.hpp"

namespace hdiv {

using detail::make_output;
using detail::Node;

namespace {

void check_affine(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  const char* op) {
    if (x.rank() < 2) fail(std::string(op) + ": input must have a batch and channel dim");
    const int64_t c = x.dim(1);
    if (gamma.rank() != 1 || gamma.dim(0) != c || beta.rank() != 1 || beta.dim(0) != c) {
        fail(std::string(op) + ": gamma/beta must have shape [" + std::to_string(c) + "]");
    }
}

}  // namespace

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  NormState& state, double eps, double momentum, bool training) {
    check_affine(x, gamma, beta, "batch_norm");
    const auto b = static_cast<std::size_t>(x.dim(0));
    const auto c = static_cast<std::size_t>(x.dim(1));
    std::size_t spatial = 1;
    for (int i = 2; i < x.rank(); ++i) spatial *= static_cast<std::size_t>(x.dim(i));
    const std::size_t reduce = b * spatial;
    if (training && b < 2) fail("batch_norm: training mode needs batch size >= 2");
    if (state.running_mean.empty()) {
        state.running_mean.assign(c, 0.0);
        state.running_var.assign(c, 1.0);
    } else if (state.running_mean.size() != c || state.running_var.size() != c) {
        fail("batch_norm: running stats sized for a different channel count");
    }

    const double* xv = x.data();
    auto xhat = std::make_shared<std::vector<double>>(x.values().size());
    auto istd = std::make_shared<std::vector<double>>(c);
    std::vector<double> out(x.values().size());

    for (std::size_t ch = 0; ch < c; ++ch) {
        double mean;
        double var;
        if (training) {
            double s = 0.0;
            for (std::size_t bi = 0; bi < b; ++bi) {
                const double* blk = xv + (bi * c + ch) * spatial;
                for (std::size_t j = 0; j < spatial; ++j) s += blk[j];
            }
            mean = s / static_cast<double>(reduce);
            double sq = 0.0;
            for (std::size_t bi = 0; bi < b; ++bi) {
                const double* blk = xv + (bi * c + ch) * spatial;
                for (std::size_t j = 0; j < spatial; ++j) {
                    const double d = blk[j] - mean;
                    sq += d * d;
                }
            }
            var = sq / static_cast<double>(reduce);  // biased, also kept in running_var
            state.running_mean[ch] = (1.0 - momentum) * state.running_mean[ch] + momentum * mean;
            state.running_var[ch] = (1.0 - momentum) * state.running_var[ch] + momentum * var;
        } else {
            mean = state.running_mean[ch];
            var = state.running_var[ch];
        }
        const double is = 1.0 / std::sqrt(var + eps);
        (*istd)[ch] = is;
        const double g = gamma.data()[ch];
        const double be = beta.data()[ch];
        for (std::size_t bi = 0; bi < b; ++bi) {
            const std::size_t base = (bi * c + ch) * spatial;
            for (std::size_t j = 0; j < spatial; ++j) {
                const double xh = (xv[base + j] - mean) * is;
                (*xhat)[base + j] = xh;
                out[base + j] = g * xh + be;
            }
        }
    }

    Tensor y = make_output(x.shape(), std::move(out), {x.ptr(), gamma.ptr(), beta.ptr()},
                           "batch_norm");
    if (!y.requires_grad()) return y;

    auto xn = x.ptr();
    auto gn = gamma.ptr();
    auto bn = beta.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, gn, bn, yn, xhat, istd, b, c, spatial, reduce, training]() {
        const double* g = yn->grad.data();
        for (std::size_t ch = 0; ch < c; ++ch) {
            double gsum = 0.0;
            double gxsum = 0.0;
            for (std::size_t bi = 0; bi < b; ++bi) {
                const std::size_t base = (bi * c + ch) * spatial;
                for (std::size_t j = 0; j < spatial; ++j) {
                    gsum += g[base + j];
                    gxsum += g[base + j] * (*xhat)[base + j];
                }
            }
            if (gn->requires_grad) {
                gn->ensure_grad();
                gn->grad[ch] += gxsum;
            }
            if (bn->requires_grad) {
                bn->ensure_grad();
                bn->grad[ch] += gsum;
            }
            if (xn->requires_grad) {
                xn->ensure_grad();
                const double gam = gn->values[ch];
                const double is = (*istd)[ch];
                double* xg = xn->grad.data();
                if (training) {
                    const double invr = 1.0 / static_cast<double>(reduce);
                    for (std::size_t bi = 0; bi < b; ++bi) {
                        const std::size_t base = (bi * c + ch) * spatial;
                        for (std::size_t j = 0; j < spatial; ++j) {
                            xg[base + j] += gam * is *
                                            (g[base + j] -
                                             invr * (gsum + (*xhat)[base + j] * gxsum));
                        }
                    }
                } else {
                    for (std::size_t bi = 0; bi < b; ++bi) {
                        const std::size_t base = (bi * c + ch) * spatial;
                        for (std::size_t j = 0; j < spatial; ++j) {
                            xg[base + j] += gam * is * g[base + j];
                        }
                    }
                }
            }
        }
    };
    return y;
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    check_affine(x, gamma, beta, "layer_norm");
    const auto n = static_cast<std::size_t>(x.dim(0));
    const auto c = static_cast<std::size_t>(x.dim(1));
    std::size_t spatial = 1;
    for (int i = 2; i < x.rank(); ++i) spatial *= static_cast<std::size_t>(x.dim(i));
    const std::size_t d = c * spatial;  // per-sample feature count
    if (d == 0) fail("layer_norm: empty feature dims");

    const double* xv = x.data();
    auto xhat = std::make_shared<std::vector<double>>(x.values().size());
    auto istd = std::make_shared<std::vector<double>>(n);
    std::vector<double> out(x.values().size());

    for (std::size_t si = 0; si < n; ++si) {
        const double* row = xv + si * d;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += row[j];
        const double mean = s / static_cast<double>(d);
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = row[j] - mean;
            sq += dv * dv;
        }
        const double var = sq / static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        (*istd)[si] = is;
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double gam = gamma.data()[ch];
            const double be = beta.data()[ch];
            const std::size_t base = si * d + ch * spatial;
            for (std::size_t j = 0; j < spatial; ++j) {
                const double xh = (row[ch * spatial + j] - mean) * is;
                (*xhat)[base + j] = xh;
                out[base + j] = gam * xh + be;
            }
        }
    }

    Tensor y = make_output(x.shape(), std::move(out), {x.ptr(), gamma.ptr(), beta.ptr()},
                           "layer_norm");
    if (!y.requires_grad()) return y;

    auto xn = x.ptr();
    auto gn = gamma.ptr();
    auto bn = beta.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, gn, bn, yn, xhat, istd, n, c, spatial, d]() {
        const double* g = yn->grad.data();
        if (gn->requires_grad || bn->requires_grad) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                double gxsum = 0.0;
                double gsum = 0.0;
                for (std::size_t si = 0; si < n; ++si) {
                    const std::size_t base = si * d + ch * spatial;
                    for (std::size_t j = 0; j < spatial; ++j) {
                        gxsum += g[base + j] * (*xhat)[base + j];
                        gsum += g[base + j];
                    }
                }
                if (gn->requires_grad) {
                    gn->ensure_grad();
                    gn->grad[ch] += gxsum;
                }
                if (bn->requires_grad) {
                    bn->ensure_grad();
                    bn->grad[ch] += gsum;
                }
            }
        }
        if (xn->requires_grad) {
            xn->ensure_grad();
            double* xg = xn->grad.data();
            std::vector<double> du(d);
            for (std::size_t si = 0; si < n; ++si) {
                double dsum = 0.0;
                double dxsum = 0.0;
                for (std::size_t ch = 0; ch < c; ++ch) {
                    const double gam = gn->values[ch];
                    const std::size_t base = si * d + ch * spatial;
                    for (std::size_t j = 0; j < spatial; ++j) {
                        const double v = g[base + j] * gam;
                        du[ch * spatial + j] = v;
                        dsum += v;
                        dxsum += v * (*xhat)[base + j];
                    }
                }
                const double is = (*istd)[si];
                const double invd = 1.0 / static_cast<double>(d);
                for (std::size_t j = 0; j < d; ++j) {
                    xg[si * d + j] +=
                        is * (du[j] - invd * (dsum + (*xhat)[si * d + j] * dxsum));
                }
            }
        }
    };
    return y;
}

}  // namespace hdiv
