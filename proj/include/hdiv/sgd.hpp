#pragma once

#include <vector>

#include "hdiv/tensor.hpp"

namespace hdiv {

// SGD with classical momentum:
//   v <- momentum * v + grad + weight_decay * param
//   param <- param - lr * v
// Gradients are left untouched; the training loop zeroes them.
class Sgd {
  public:
    explicit Sgd(std::vector<Tensor> params);

    void step(double lr, double momentum, double weight_decay);
    void zero_grad();
    std::size_t size() const { return params_.size(); }

  private:
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> velocity_;
};

}  // namespace hdiv
