// SPDX-License-Identifier: Apache-2.0
#include "attndse/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "attndse/error.hpp"

namespace adse {

void check_finite_gradients(std::span<Parameter* const> params) {
  for (const Parameter* p : params) {
    for (double g : p->value.grad())
      if (!std::isfinite(g)) throw NumericalError("non-finite gradient in parameter '" + p->name + "'");
  }
}

Sgd::Sgd(double lr, double momentum) : lr_(lr), momentum_(momentum) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0, 1)");
}

void Sgd::step(std::span<Parameter* const> params) {
  check_finite_gradients(params);
  if (velocity_.size() != params.size()) {
    velocity_.clear();
    for (const Parameter* p : params) velocity_.emplace_back(p->value.size(), 0.0);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = params[i]->value;
    if (!t.has_grad()) continue;
    auto g = t.grad();
    auto x = t.data();
    auto& vel = velocity_[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (momentum_ > 0.0) {
        vel[j] = momentum_ * vel[j] + g[j];
        x[j] -= lr_ * vel[j];
      } else {
        x[j] -= lr_ * g[j];
      }
    }
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

void Adam::step(std::span<Parameter* const> params) {
  check_finite_gradients(params);
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const Parameter* p : params) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = params[i]->value;
    if (!t.has_grad()) continue;
    auto g = t.grad();
    auto x = t.data();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      x[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
    }
  }
}

void Adam::set_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  lr_ = lr;
}

void sgd_step(std::span<Parameter* const> params, double lr) { Sgd(lr).step(params); }

}  // namespace adse
