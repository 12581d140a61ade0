#pragma once

// Differentiable tensor operations. Each op validates shapes, computes the
// forward value, and records a backward rule that accumulates into parent
// grads. Forward outputs are checked finite.

#include <vector>

#include "hdiv/tensor.hpp"

namespace hdiv {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose2d(const Tensor& x);

// Cross-correlation over B×C×H×W input with F×C×k×k filters.
// Output spatial size (H + 2*pad - k)/stride + 1 must be integral.
Tensor conv2d(const Tensor& x, const Tensor& w, int stride, int pad);

Tensor relu(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor add_bias(const Tensor& x, const Tensor& b);  // x: N×D, b: D
Tensor mul_scalar(const Tensor& x, double c);
Tensor global_avg_pool(const Tensor& x);  // B×C×H×W → B×C
Tensor sum_all(const Tensor& x);          // → scalar

Tensor log_softmax(const Tensor& x);  // row-wise, max-stabilized
// Mean negative log-likelihood; `logp` holds log-probabilities.
Tensor cross_entropy(const Tensor& logp, const std::vector<int>& labels);

struct NormState {
    std::vector<double> running_mean;
    std::vector<double> running_var;
};

// Per-channel standardization over batch and spatial dims (training) or the
// running statistics (eval). Training requires batch size >= 2 and updates
// the running stats in place with momentum 0.1 by default.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  NormState& state, double eps, double momentum, bool training);

// Per-sample standardization over all non-batch dims; gamma/beta are indexed
// by dim 1 so the two norm kinds are drop-in interchangeable.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps);

// Row-wise projection onto the unit sphere. Rows with norm < eps map to the
// fixed unit vector e1 (and pass no gradient).
Tensor l2_normalize_rows(const Tensor& x, double eps = 1e-12);

// Per-row log(sum_{k != i} exp(s[i][k])), max-stabilized; the self column is
// excluded. Building block for the contrastive loss denominator.
Tensor row_logsumexp_excluding_self(const Tensor& s);
// out[i] = s[i][i^1] under the (2m, 2m+1) positive-pair layout.
Tensor gather_pair_partner(const Tensor& s);

}  // namespace hdiv
