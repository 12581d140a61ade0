#include "hdiv/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdiv/kernels.hpp"
#include "op_common.hpp"

namespace hdiv {

using detail::make_output;
using detail::Node;
using detail::transpose_buf;

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        fail("matmul: expected rank-2 tensors, got " + shape_str(a.shape()) + " and " +
             shape_str(b.shape()));
    }
    const auto m = static_cast<std::size_t>(a.dim(0));
    const auto k = static_cast<std::size_t>(a.dim(1));
    const auto n = static_cast<std::size_t>(b.dim(1));
    if (b.dim(0) != a.dim(1)) {
        fail("matmul: inner dims disagree: " + shape_str(a.shape()) + " x " +
             shape_str(b.shape()));
    }
    std::vector<double> out(m * n);
    kernels::gemm(a.data(), b.data(), out.data(), m, k, n, false);

    Tensor y = make_output({a.dim(0), b.dim(1)}, std::move(out), {a.ptr(), b.ptr()}, "matmul");
    if (!y.requires_grad()) return y;

    auto an = a.ptr();
    auto bn = b.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [an, bn, yn, m, k, n]() {
        const double* g = yn->grad.data();
        if (an->requires_grad) {
            // a.grad += g * b^T
            std::vector<double> bt(k * n);
            transpose_buf(bn->values.data(), k, n, bt.data());
            an->ensure_grad();
            kernels::gemm(g, bt.data(), an->grad.data(), m, n, k, true);
        }
        if (bn->requires_grad) {
            // b.grad += a^T * g
            std::vector<double> at(m * k);
            transpose_buf(an->values.data(), m, k, at.data());
            bn->ensure_grad();
            kernels::gemm(at.data(), g, bn->grad.data(), k, m, n, true);
        }
    };
    return y;
}

Tensor transpose2d(const Tensor& x) {
    if (x.rank() != 2) fail("transpose2d: expected rank-2, got " + shape_str(x.shape()));
    const auto r = static_cast<std::size_t>(x.dim(0));
    const auto c = static_cast<std::size_t>(x.dim(1));
    std::vector<double> out(r * c);
    transpose_buf(x.data(), r, c, out.data());
    Tensor y = make_output({x.dim(1), x.dim(0)}, std::move(out), {x.ptr()}, "transpose2d");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn, r, c]() {
        xn->ensure_grad();
        // x.grad += g^T, accumulated element-wise
        const double* g = yn->grad.data();
        double* xg = xn->grad.data();
        for (std::size_t j = 0; j < c; ++j) {
            for (std::size_t i = 0; i < r; ++i) {
                xg[i * c + j] += g[j * r + i];
            }
        }
    };
    return y;
}

Tensor relu(const Tensor& x) {
    std::vector<double> out(x.values().begin(), x.values().end());
    for (double& v : out) v = v > 0.0 ? v : 0.0;
    Tensor y = make_output(x.shape(), std::move(out), {x.ptr()}, "relu");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn]() {
        xn->ensure_grad();
        const double* g = yn->grad.data();
        const double* xv = xn->values.data();
        double* xg = xn->grad.data();
        const std::size_t n = xn->values.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (xv[i] > 0.0) xg[i] += g[i];
        }
    };
    return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        fail("add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    std::vector<double> out(static_cast<std::size_t>(a.size()));
    kernels::vadd(a.data(), b.data(), out.data(), out.size());
    Tensor y = make_output(a.shape(), std::move(out), {a.ptr(), b.ptr()}, "add");
    if (!y.requires_grad()) return y;
    auto an = a.ptr();
    auto bn = b.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [an, bn, yn]() {
        const double* g = yn->grad.data();
        const std::size_t n = yn->grad.size();
        if (an->requires_grad) {
            an->ensure_grad();
            kernels::axpy(1.0, g, an->grad.data(), n);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            kernels::axpy(1.0, g, bn->grad.data(), n);
        }
    };
    return y;
}

Tensor add_bias(const Tensor& x, const Tensor& b) {
    if (x.rank() != 2 || b.rank() != 1 || b.dim(0) != x.dim(1)) {
        fail("add_bias: expected N×D plus D, got " + shape_str(x.shape()) + " and " +
             shape_str(b.shape()));
    }
    const auto n = static_cast<std::size_t>(x.dim(0));
    const auto d = static_cast<std::size_t>(x.dim(1));
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        kernels::vadd(x.data() + i * d, b.data(), out.data() + i * d, d);
    }
    Tensor y = make_output(x.shape(), std::move(out), {x.ptr(), b.ptr()}, "add_bias");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    auto bn = b.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, bn, yn, n, d]() {
        const double* g = yn->grad.data();
        if (xn->requires_grad) {
            xn->ensure_grad();
            kernels::axpy(1.0, g, xn->grad.data(), n * d);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            double* bg = bn->grad.data();
            for (std::size_t i = 0; i < n; ++i) {
                kernels::axpy(1.0, g + i * d, bg, d);
            }
        }
    };
    return y;
}

Tensor mul_scalar(const Tensor& x, double c) {
    std::vector<double> out(x.values().begin(), x.values().end());
    kernels::scale(c, out.data(), out.size());
    Tensor y = make_output(x.shape(), std::move(out), {x.ptr()}, "mul_scalar");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn, c]() {
        xn->ensure_grad();
        kernels::axpy(c, yn->grad.data(), xn->grad.data(), yn->grad.size());
    };
    return y;
}

Tensor sum_all(const Tensor& x) {
    const double s = kernels::sum(x.data(), static_cast<std::size_t>(x.size()));
    Tensor y = make_output({1}, {s}, {x.ptr()}, "sum_all");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn]() {
        xn->ensure_grad();
        const double g = yn->grad[0];
        double* xg = xn->grad.data();
        const std::size_t n = xn->values.size();
        for (std::size_t i = 0; i < n; ++i) xg[i] += g;
    };
    return y;
}

Tensor log_softmax(const Tensor& x) {
    if (x.rank() != 2) fail("log_softmax: expected rank-2, got " + shape_str(x.shape()));
    const auto n = static_cast<std::size_t>(x.dim(0));
    const auto c = static_cast<std::size_t>(x.dim(1));
    if (c == 0) fail("log_softmax: zero classes");
    std::vector<double> out(n * c);
    const double* xv = x.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = xv + i * c;
        double m = row[0];
        for (std::size_t j = 1; j < c; ++j) m = std::max(m, row[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - m);
        const double lse = m + std::log(z);
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] = row[j] - lse;
    }
    Tensor y = make_output(x.shape(), std::move(out), {x.ptr()}, "log_softmax");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn, n, c]() {
        xn->ensure_grad();
        const double* g = yn->grad.data();
        const double* yv = yn->values.data();
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            double gsum = 0.0;
            for (std::size_t j = 0; j < c; ++j) gsum += g[i * c + j];
            for (std::size_t j = 0; j < c; ++j) {
                xg[i * c + j] += g[i * c + j] - std::exp(yv[i * c + j]) * gsum;
            }
        }
    };
    return y;
}

Tensor cross_entropy(const Tensor& logp, const std::vector<int>& labels) {
    if (logp.rank() != 2) fail("cross_entropy: expected rank-2 log-probs");
    const auto n = static_cast<std::size_t>(logp.dim(0));
    const auto c = static_cast<std::size_t>(logp.dim(1));
    if (labels.size() != n) {
        fail("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
             std::to_string(n) + " rows");
    }
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= c) {
            fail("cross_entropy: label " + std::to_string(l) + " out of range [0," +
                 std::to_string(c) + ")");
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += logp.data()[i * c + static_cast<std::size_t>(labels[i])];
    }
    const double loss = -acc / static_cast<double>(n);
    Tensor y = make_output({1}, {loss}, {logp.ptr()}, "cross_entropy");
    if (!y.requires_grad()) return y;
    auto pn = logp.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [pn, yn, labels, n, c]() {
        pn->ensure_grad();
        const double g = yn->grad[0];
        double* pg = pn->grad.data();
        const double scale = -g / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            pg[i * c + static_cast<std::size_t>(labels[i])] += scale;
        }
    };
    return y;
}

Tensor l2_normalize_rows(const Tensor& x, double eps) {
    if (x.rank() != 2) fail("l2_normalize_rows: expected rank-2, got " + shape_str(x.shape()));
    const auto n = static_cast<std::size_t>(x.dim(0));
    const auto d = static_cast<std::size_t>(x.dim(1));
    if (d == 0) fail("l2_normalize_rows: zero-width rows");
    std::vector<double> out(n * d);
    auto norms = std::make_shared<std::vector<double>>(n);  // 0 marks a guarded row
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.data() + i * d;
        const double norm = std::sqrt(kernels::sumsq(row, d));
        double* orow = out.data() + i * d;
        if (norm < eps) {
            std::fill(orow, orow + d, 0.0);
            orow[0] = 1.0;
            (*norms)[i] = 0.0;
        } else {
            const double inv = 1.0 / norm;
            for (std::size_t j = 0; j < d; ++j) orow[j] = row[j] * inv;
            (*norms)[i] = norm;
        }
    }
    Tensor y = make_output(x.shape(), std::move(out), {x.ptr()}, "l2_normalize_rows");
    if (!y.requires_grad()) return y;
    auto xn = x.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [xn, yn, norms, n, d]() {
        xn->ensure_grad();
        const double* g = yn->grad.data();
        const double* yv = yn->values.data();
        double* xg = xn->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double norm = (*norms)[i];
            if (norm == 0.0) continue;  // guarded rows emit a constant
            const double* gi = g + i * d;
            const double* yi = yv + i * d;
            const double gy = kernels::dot(gi, yi, d);
            const double inv = 1.0 / norm;
            for (std::size_t j = 0; j < d; ++j) {
                xg[i * d + j] += (gi[j] - yi[j] * gy) * inv;
            }
        }
    };
    return y;
}

Tensor row_logsumexp_excluding_self(const Tensor& s) {
    if (s.rank() != 2 || s.dim(0) != s.dim(1)) {
        fail("row_logsumexp_excluding_self: expected square matrix, got " +
             shape_str(s.shape()));
    }
    const auto n = static_cast<std::size_t>(s.dim(0));
    if (n < 2) fail("row_logsumexp_excluding_self: need at least 2 rows");
    std::vector<double> out(n);
    const double* sv = s.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = sv + i * n;
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) m = std::max(m, row[k]);
        }
        double z = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) z += std::exp(row[k] - m);
        }
        out[i] = m + std::log(z);
    }
    Tensor y = make_output({s.dim(0)}, std::move(out), {s.ptr()}, "row_logsumexp_excluding_self");
    if (!y.requires_grad()) return y;
    auto sn = s.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [sn, yn, n]() {
        sn->ensure_grad();
        const double* g = yn->grad.data();
        const double* lse = yn->values.data();
        const double* sv = sn->values.data();
        double* sg = sn->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) {
                    sg[i * n + k] += g[i] * std::exp(sv[i * n + k] - lse[i]);
                }
            }
        }
    };
    return y;
}

Tensor gather_pair_partner(const Tensor& s) {
    if (s.rank() != 2 || s.dim(0) != s.dim(1)) {
        fail("gather_pair_partner: expected square matrix");
    }
    const auto n = static_cast<std::size_t>(s.dim(0));
    if (n % 2 != 0) fail("gather_pair_partner: row count must be even");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = s.data()[i * n + (i ^ 1)];
    }
    Tensor y = make_output({s.dim(0)}, std::move(out), {s.ptr()}, "gather_pair_partner");
    if (!y.requires_grad()) return y;
    auto sn = s.ptr();
    Node* yn = y.ptr().get();
    y.node().backward = [sn, yn, n]() {
        sn->ensure_grad();
        const double* g = yn->grad.data();
        double* sg = sn->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            sg[i * n + (i ^ 1)] += g[i];
        }
    };
    return y;
}

}  // namespace hdiv
