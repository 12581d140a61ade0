#include "hdiv/tensor.hpp"

#include <sstream>
#include <unordered_set>

namespace hdiv {

int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int64_t d : s) {
        if (d < 0) fail("negative dimension in shape " + shape_str(s));
        n *= d;
    }
    return n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream ss;
    ss << "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) ss << "x";
        ss << s[i];
    }
    ss << "]";
    return ss.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto n = std::make_shared<detail::Node>();
    const int64_t count = shape_numel(shape);
    n->shape = std::move(shape);
    n->values.assign(static_cast<std::size_t>(count), 0.0);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    for (double& v : t.values()) v = value;
    return t;
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
    if (shape_numel(shape) != static_cast<int64_t>(values.size())) {
        fail("from_values: " + shape_str(shape) + " does not hold " +
             std::to_string(values.size()) + " values");
    }
    auto n = std::make_shared<detail::Node>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from_values({1}, {value}, requires_grad);
}

void Tensor::zero_grad() {
    auto& g = node().grad;
    if (!g.empty()) g.assign(g.size(), 0.0);
}

double Tensor::item() const {
    if (size() != 1) fail("item() on non-scalar tensor " + shape_str(shape()));
    return node().values[0];
}

void backward(const Tensor& loss) {
    if (!loss.defined()) fail("backward: undefined tensor");
    if (loss.size() != 1) {
        fail("backward: loss must be scalar, got " + shape_str(loss.shape()));
    }
    detail::Node* root = loss.ptr().get();
    if (!root->requires_grad) return;

    // Iterative post-order DFS over grad-requiring parents.
    std::vector<detail::Node*> topo;
    std::unordered_set<detail::Node*> visited;
    std::vector<std::pair<detail::Node*, std::size_t>> stack;
    stack.emplace_back(root, 0);
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            detail::Node* p = node->parents[next].get();
            ++next;
            if (p->requires_grad && visited.insert(p).second) {
                stack.emplace_back(p, 0);
            }
        } else {
            topo.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] += 1.0;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        if ((*it)->backward) (*it)->backward();
    }
    for (detail::Node* n : topo) {
        if (!n->grad.empty()) check_finite(n->grad, "backward gradients");
    }
}

}  // namespace hdiv
