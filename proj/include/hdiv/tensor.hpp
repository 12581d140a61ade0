#pragma once

// Dense f64 tensors with reverse-mode autodiff. A Tensor is a value-semantic
// handle to a graph node; ops (ops.hpp) record a backward rule on the output
// node that accumulates into the parents' grad buffers. Gradients persist
// across backward() calls until explicitly zeroed.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hdiv/util.hpp"

namespace hdiv {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;  // empty until first needed; same length as values after
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void()> backward;  // accumulates this->grad into parents

    void ensure_grad() {
        if (grad.empty()) grad.assign(values.size(), 0.0);
    }
};

}  // namespace detail

class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<detail::Node> n) : n_(std::move(n)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from_values(Shape shape, std::vector<double> values,
                              bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return n_ != nullptr; }
    const Shape& shape() const { return node().shape; }
    int rank() const { return static_cast<int>(node().shape.size()); }
    int64_t dim(int i) const { return node().shape[static_cast<std::size_t>(i)]; }
    int64_t size() const { return static_cast<int64_t>(node().values.size()); }

    std::span<double> values() { return node().values; }
    std::span<const double> values() const { return node().values; }
    double* data() { return node().values.data(); }
    const double* data() const { return node().values.data(); }

    bool requires_grad() const { return node().requires_grad; }
    void set_requires_grad(bool rg) { node().requires_grad = rg; }

    bool has_grad() const { return !node().grad.empty(); }
    std::span<double> grad() {
        node().ensure_grad();
        return node().grad;
    }
    std::span<const double> grad_view() const { return node().grad; }
    void zero_grad();

    double item() const;

    detail::Node& node() { return *n_; }
    const detail::Node& node() const { return *n_; }
    const std::shared_ptr<detail::Node>& ptr() const { return n_; }

  private:
    std::shared_ptr<detail::Node> n_;
};

// Reverse-mode sweep from a scalar loss. Seeds d(loss)/d(loss) = 1 and runs
// recorded backward rules in reverse topological order. Grad buffers
// accumulate; callers zero them between steps.
void backward(const Tensor& loss);

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

}  // namespace hdiv
