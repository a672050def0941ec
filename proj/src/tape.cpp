// SPDX-License-Identifier: Apache-2.0
#include "attndse/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "attndse/error.hpp"
#include "attndse/kernels.hpp"

namespace adse {
namespace {

void require(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + detail);
}

void require_matrix(const Tensor& t, const char* op) {
  require(t.rank() == 2, op, "expected a rank-2 tensor, got " + t.shape_string());
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

double gelu(double x) {
  const double u = kGeluC * (x + 0.044715 * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double gelu_grad(double x) {
  const double u = kGeluC * (x + 0.044715 * x * x * x);
  const double t = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string_view activation_name(Activation a) {
  return a == Activation::kGelu ? "gelu" : "silu";
}

Activation parse_activation(std::string_view name) {
  if (name == "gelu") return Activation::kGelu;
  if (name == "silu") return Activation::kSilu;
  throw InputError("unknown activation '" + std::string(name) + "' (expected gelu or silu)");
}

Tape::Node& Tape::node(Var v) {
  if (v.id >= nodes_.size()) throw std::out_of_range("tape variable out of range");
  return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw std::out_of_range("tape variable out of range");
  return nodes_[v.id];
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.op = "constant";
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::parameter(Tensor& param) {
  Node n;
  n.param = &param;
  n.op = "parameter";
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::view(const Tensor& t) {
  Node n;
  n.view = &t;
  n.op = "view";
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = node(v);
  if (n.param) return *n.param;
  return n.view ? *n.view : n.value;
}

std::span<double> Tape::grad(Var v) { return node(v).grad; }
std::span<const double> Tape::grad(Var v) const { return node(v).grad; }

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward, std::string_view op) {
  Node n;
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  n.backward = std::move(backward);
  n.op = op;
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  require(av.cols() == bv.rows(), "matmul",
          "inner dimensions differ: " + av.shape_string() + " x " + bv.shape_string());
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor out({m, n});
  kernels::active().gemm_nn(m, n, k, av.data().data(), bv.data().data(), out.data().data(), false);
  return record(std::move(out), {a, b},
                [a, b, m, k, n](Tape& t, std::uint32_t self) {
                  const auto& kt = kernels::active();
                  const double* dc = t.grad(Var{self}).data();
                  // dA = dC * B^T, dB = A^T * dC
                  kt.gemm_nt(m, k, n, dc, t.value(b).data().data(), t.grad(a).data(), true);
                  kt.gemm_tn(k, n, m, t.value(a).data().data(), dc, t.grad(b).data(), true);
                },
                "matmul");
}

Var Tape::matmul_nt(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require_matrix(av, "matmul_nt");
  require_matrix(bv, "matmul_nt");
  require(av.cols() == bv.cols(), "matmul_nt",
          "inner dimensions differ: " + av.shape_string() + " x " + bv.shape_string() + "^T");
  const std::size_t m = av.rows(), k = av.cols(), n = bv.rows();
  Tensor out({m, n});
  kernels::active().gemm_nt(m, n, k, av.data().data(), bv.data().data(), out.data().data(), false);
  return record(std::move(out), {a, b},
                [a, b, m, k, n](Tape& t, std::uint32_t self) {
                  const auto& kt = kernels::active();
                  const double* dc = t.grad(Var{self}).data();
                  // C = A B^T: dA = dC * B, dB = dC^T * A
                  kt.gemm_nn(m, k, n, dc, t.value(b).data().data(), t.grad(a).data(), true);
                  kt.gemm_tn(n, k, m, dc, t.value(a).data().data(), t.grad(b).data(), true);
                },
                "matmul_nt");
}

Var Tape::add(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.same_shape(bv), "add", av.shape_string() + " vs " + bv.shape_string());
  Tensor out = av;
  kernels::active().axpy(out.size(), 1.0, bv.data().data(), out.data().data());
  return record(std::move(out), {a, b},
                [a, b](Tape& t, std::uint32_t self) {
                  const auto g = t.grad(Var{self});
                  const auto& kt = kernels::active();
                  kt.axpy(g.size(), 1.0, g.data(), t.grad(a).data());
                  kt.axpy(g.size(), 1.0, g.data(), t.grad(b).data());
                },
                "add");
}

Var Tape::add_bias(Var a, Var bias) {
  const Tensor& av = value(a);
  const Tensor& bv = value(bias);
  require_matrix(av, "add_bias");
  require(bv.size() == av.cols(), "add_bias",
          "bias " + bv.shape_string() + " does not match " + av.shape_string());
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out = av;
  const auto& kt = kernels::active();
  for (std::size_t r = 0; r < rows; ++r)
    kt.axpy(cols, 1.0, bv.data().data(), out.data().data() + r * cols);
  return record(std::move(out), {a, bias},
                [a, bias, rows, cols](Tape& t, std::uint32_t self) {
                  const auto g = t.grad(Var{self});
                  const auto& kt = kernels::active();
                  kt.axpy(g.size(), 1.0, g.data(), t.grad(a).data());
                  double* gb = t.grad(bias).data();
                  for (std::size_t r = 0; r < rows; ++r) kt.axpy(cols, 1.0, g.data() + r * cols, gb);
                },
                "add_bias");
}

Var Tape::mul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  require(av.same_shape(bv), "mul", av.shape_string() + " vs " + bv.shape_string());
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return record(std::move(out), {a, b},
                [a, b](Tape& t, std::uint32_t self) {
                  const auto g = t.grad(Var{self});
                  const auto& x = t.value(a);
                  const auto& y = t.value(b);
                  auto ga = t.grad(a);
                  auto gb = t.grad(b);
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    ga[i] += g[i] * y[i];
                    gb[i] += g[i] * x[i];
                  }
                },
                "mul");
}

Var Tape::scale(Var a, double s) {
  Tensor out = value(a);
  for (double& v : out.data()) v *= s;
  return record(std::move(out), {a},
                [a, s](Tape& t, std::uint32_t self) {
                  const auto g = t.grad(Var{self});
                  kernels::active().axpy(g.size(), s, g.data(), t.grad(a).data());
                },
                "scale");
}

Var Tape::softmax_rows(Var a) {
  const Tensor& av = value(a);
  require_matrix(av, "softmax_rows");
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = av.data().data() + r * cols;
    double* y = out.data().data() + r * cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
      if (std::isnan(x[c])) throw NumericalError("softmax_rows: NaN input at row " + std::to_string(r));
      mx = std::max(mx, x[c]);
    }
    if (!std::isfinite(mx))
      throw NumericalError("softmax_rows: row " + std::to_string(r) + " has no finite entry");
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  return record(std::move(out), {a},
                [a, rows, cols](Tape& t, std::uint32_t self) {
                  const Var out_var{self};
                  const double* p = t.value(out_var).data().data();
                  const double* g = t.grad(out_var).data();
                  double* ga = t.grad(a).data();
                  for (std::size_t r = 0; r < rows; ++r) {
                    const std::size_t o = r * cols;
                    double inner = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) inner += g[o + c] * p[o + c];
                    for (std::size_t c = 0; c < cols; ++c) ga[o + c] += p[o + c] * (g[o + c] - inner);
                  }
                },
                "softmax_rows");
}

Var Tape::layer_norm(Var a, double eps) {
  const Tensor& av = value(a);
  require_matrix(av, "layer_norm");
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out({rows, cols});
  std::vector<double> inv_std(rows);
  const double n = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = av.data().data() + r * cols;
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += x[c];
    mean /= n;
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (x[c] - mean) * (x[c] - mean);
    var /= n;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = (x[c] - mean) * inv_std[r];
  }
  return record(std::move(out), {a},
                [a, rows, cols, n, inv_std = std::move(inv_std)](Tape& t, std::uint32_t self) {
                  const Var out_var{self};
                  const double* y = t.value(out_var).data().data();
                  const double* g = t.grad(out_var).data();
                  double* ga = t.grad(a).data();
                  for (std::size_t r = 0; r < rows; ++r) {
                    const std::size_t o = r * cols;
                    double mean_g = 0.0, mean_gy = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) {
                      mean_g += g[o + c];
                      mean_gy += g[o + c] * y[o + c];
                    }
                    mean_g /= n;
                    mean_gy /= n;
                    for (std::size_t c = 0; c < cols; ++c)
                      ga[o + c] += inv_std[r] * (g[o + c] - mean_g - y[o + c] * mean_gy);
                  }
                },
                "layer_norm");
}

Var Tape::activation(Var a, Activation kind) {
  Tensor out = value(a);
  for (double& v : out.data()) v = kind == Activation::kGelu ? gelu(v) : v * sigmoid(v);
  return record(std::move(out), {a},
                [a, kind](Tape& t, std::uint32_t self) {
                  const auto g = t.grad(Var{self});
                  const auto& x = t.value(a);
                  auto ga = t.grad(a);
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    double d;
                    if (kind == Activation::kGelu) {
                      d = gelu_grad(x[i]);
                    } else {
                      const double s = sigmoid(x[i]);
                      d = s * (1.0 + x[i] * (1.0 - s));
                    }
                    ga[i] += g[i] * d;
                  }
                },
                activation_name(kind));
}

Var Tape::gather_rows(Var a, std::span<const std::size_t> rows) {
  const Tensor& av = value(a);
  require_matrix(av, "gather_rows");
  const std::size_t cols = av.cols();
  Tensor out({rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < av.rows(), "gather_rows",
            "row " + std::to_string(rows[i]) + " outside " + av.shape_string());
    std::copy_n(av.data().data() + rows[i] * cols, cols, out.data().data() + i * cols);
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return record(std::move(out), {a},
                [a, cols, idx = std::move(idx)](Tape& t, std::uint32_t self) {
                  const double* g = t.grad(Var{self}).data();
                  double* ga = t.grad(a).data();
                  const auto& kt = kernels::active();
                  for (std::size_t i = 0; i < idx.size(); ++i)
                    kt.axpy(cols, 1.0, g + i * cols, ga + idx[i] * cols);
                },
                "gather_rows");
}

Var Tape::sum(Var a) {
  double total = 0.0;
  for (double v : value(a).data()) total += v;
  return record(Tensor({1, 1}, {total}), {a},
                [a](Tape& t, std::uint32_t self) {
                  const double g = t.grad(Var{self})[0];
                  for (double& v : t.grad(a)) v += g;
                },
                "sum");
}

Var Tape::mse(Var pred, const Tensor& target) {
  const Tensor& pv = value(pred);
  require(pv.size() == target.size(), "mse",
          "prediction " + pv.shape_string() + " vs target " + target.shape_string());
  const double n = static_cast<double>(pv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - target[i];
    total += d * d;
  }
  return record(Tensor({1, 1}, {total / n}), {pred},
                [pred, target, n](Tape& t, std::uint32_t self) {
                  const double g = t.grad(Var{self})[0];
                  const auto& pv = t.value(pred);
                  auto gp = t.grad(pred);
                  for (std::size_t i = 0; i < gp.size(); ++i)
                    gp[i] += g * 2.0 * (pv[i] - target[i]) / n;
                },
                "mse");
}

void Tape::backward(Var root) {
  if (value(root).size() != 1)
    throw std::invalid_argument("backward: root must hold a single element, got " +
                                value(root).shape_string());
  for (Node& n : nodes_) {
    const Tensor& v = n.param ? *n.param : (n.view ? *n.view : n.value);
    n.grad.assign(v.size(), 0.0);
  }
  nodes_[root.id].grad[0] = 1.0;
  for (std::uint32_t id = root.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.backward) n.backward(*this, id);
  }
  for (Node& n : nodes_) {
    if (!n.param) continue;
    n.param->enable_grad();
    kernels::active().axpy(n.grad.size(), 1.0, n.grad.data(), n.param->grad().data());
  }
}

}  // namespace adse
