#include "hdiv/sgd.hpp"

#include "hdiv/kernels.hpp"

namespace hdiv {

Sgd::Sgd(std::vector<Tensor> params) : params_(std::move(params)) {
    velocity_.reserve(params_.size());
    for (const auto& p : params_) {
        velocity_.emplace_back(static_cast<std::size_t>(p.size()), 0.0);
    }
}

void Sgd::step(double lr, double momentum, double weight_decay) {
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Tensor& p = params_[pi];
        if (!p.has_grad()) {
            fail("sgd_step: missing grad on registered parameter (index " +
                 std::to_string(pi) + ")");
        }
        const auto n = static_cast<std::size_t>(p.size());
        double* v = velocity_[pi].data();
        double* w = p.data();
        const double* g = p.grad_view().data();
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = momentum * v[i] + g[i] + weight_decay * w[i];
            w[i] -= lr * v[i];
        }
        check_finite(p.values(), "sgd_step parameters");
    }
}

void Sgd::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

}  // namespace hdiv
