// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "attndse/tensor.hpp"

namespace adse {

// Handle to a value recorded on a Tape.
struct Var {
  std::uint32_t id = UINT32_MAX;
};

enum class Activation { kGelu, kSilu };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Reverse-mode differentiation tape. Operations are appended in evaluation
// order, so the node list is already topologically sorted; backward() walks
// it in exact reverse. A tape is single-use and single-threaded.
class Tape {
 public:
  // Receives the tape and the id of the node whose output gradient is ready.
  using BackwardFn = std::function<void(Tape&, std::uint32_t)>;

  Var constant(Tensor value);
  // The tensor must outlive the tape; backward() accumulates into its grad().
  Var parameter(Tensor& param);
  // Read-only reference to a tensor that outlives the tape; no gradient is
  // written back (inference on shared models).
  Var view(const Tensor& t);

  const Tensor& value(Var v) const;
  // Gradient buffer of a node; valid during and after backward().
  std::span<double> grad(Var v);
  std::span<const double> grad(Var v) const;

  Var matmul(Var a, Var b);     // [m x k] * [k x n]
  Var matmul_nt(Var a, Var b);  // [m x k] * [n x k]^T
  Var add(Var a, Var b);
  Var add_bias(Var a, Var bias);  // bias [1 x n] broadcast over rows
  Var mul(Var a, Var b);          // elementwise
  Var scale(Var a, double s);
  Var softmax_rows(Var a);
  Var layer_norm(Var a, double eps);
  Var activation(Var a, Activation kind);
  Var gather_rows(Var a, std::span<const std::size_t> rows);
  Var sum(Var a);
  Var mse(Var pred, const Tensor& target);

  // Appends a custom operation. The backward function reads grad(output) and
  // accumulates into the inputs' gradients.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward, std::string_view op);

  // Seeds d(root)/d(root) = 1 (root must hold one element) and propagates.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }
  std::string_view op_name(Var v) const { return nodes_[v.id].op; }
  const std::vector<Var>& inputs(Var v) const { return nodes_[v.id].inputs; }

 private:
  struct Node {
    Tensor value;
    Tensor* param = nullptr;
    const Tensor* view = nullptr;
    std::vector<double> grad;
    std::vector<Var> inputs;
    BackwardFn backward;
    std::string_view op;
  };

  Node& node(Var v);
  const Node& node(Var v) const;

  std::vector<Node> nodes_;
};

}  // namespace adse
