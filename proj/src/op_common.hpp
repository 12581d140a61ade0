#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hdiv/tensor.hpp"

namespace hdiv::detail {

inline bool any_requires_grad(const std::vector<std::shared_ptr<Node>>& parents) {
    for (const auto& p : parents) {
        if (p->requires_grad) return true;
    }
    return false;
}

inline Tensor make_output(Shape shape, std::vector<double> values,
                          std::vector<std::shared_ptr<Node>> parents,
                          const char* op_name) {
    check_finite(values, op_name);
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    n->requires_grad = any_requires_grad(parents);
    if (n->requires_grad) {
        n->parents = std::move(parents);
    }
    return Tensor(std::move(n));
}

inline void transpose_buf(const double* src, std::size_t rows, std::size_t cols,
                          double* dst) {
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}

}  // namespace hdiv::detail
