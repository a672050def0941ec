// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "attndse/tensor.hpp"

namespace adse {

// p <- p - lr * g, optionally through a momentum buffer (heavy ball):
//   v <- momentum * v + g;  p <- p - lr * v
// Throws NumericalError on a non-finite gradient before touching any
// parameter.
class Sgd {
 public:
  explicit Sgd(double lr, double momentum = 0.0);
  void step(std::span<Parameter* const> params);

 private:
  double lr_;
  double momentum_;
  std::vector<std::vector<double>> velocity_;
};

// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<Parameter* const> params);
  double lr() const { return lr_; }
  void set_lr(double lr);

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// One plain gradient step over a parameter set.
void sgd_step(std::span<Parameter* const> params, double lr);

// Throws NumericalError naming the first parameter with a NaN/inf gradient.
void check_finite_gradients(std::span<Parameter* const> params);

}  // namespace adse
