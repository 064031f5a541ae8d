// Copyright 2026 The motionood Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MOTIONOOD_AUTODIFF_HPP_
#define MOTIONOOD_AUTODIFF_HPP_

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "motionood/tensor.hpp"

namespace motionood {

enum class OpKind {
  kLeaf,
  kMatMul,
  kGraphMix,
  kAdd,
  kSub,
  kMul,
  kAddBias,
  kScale,
  kAddScalar,
  kTanh,
  kRelu,
  kExp,
  kLog,
  kSquare,
  kSqrt,
  kAbs,
  kClamp,
  kSum,
  kBatchNorm,
  kBatchNormEval,
  kDropoutMask,
  kSlice,
  kConcat,
  kReshape,
  kLogSoftmax,
};

std::string_view op_name(OpKind op);

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its graph
// is alive.
class Var {
 public:
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();

  Var() = default;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  bool valid() const { return graph_ != nullptr && id_ != kInvalid; }
  std::size_t id() const { return id_; }
  Graph& graph() const { return *graph_; }

  const Shape& shape() const;
  const Tensor& value() const;
  const Tensor& grad() const;

 private:
  Graph* graph_ = nullptr;
  std::size_t id_ = kInvalid;
};

// Reverse-mode differentiation tape over dense tensors.
//
// Construction records nodes and infers shapes (shape errors surface here);
// evaluate() runs the forward pass and caches intermediates; backward()
// propagates a seed from an evaluated output to every node that depends on a
// parameter leaf. Node ids are a topological order, so both passes are plain
// sweeps. Leaf values may be replaced with set_value(), which invalidates the
// cached forward from that leaf onward; this is what finite-difference
// checking relies on.
//
// A graph is confined to one thread.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf that receives a gradient.
  Var parameter(Tensor value);
  // Leaf treated as a constant.
  Var constant(Tensor value);

  void set_value(Var leaf, Tensor value);
  bool is_leaf(Var v) const;
  bool requires_grad(Var v) const;

  // Evaluates every node with id <= output.id(). Throws NumericError naming
  // the offending op if any value is non-finite.
  const Tensor& evaluate(Var output);
  // Leaves always hold a value; other nodes once a sweep has reached them.
  bool evaluated(Var v) const {
    return v.id() < evaluated_upto_ || nodes_.at(v.id()).op == OpKind::kLeaf;
  }

  // Seeds d(output) with `seed` and accumulates gradients; previous
  // gradients are discarded. Requires evaluate(output) to be current.
  void backward(Var output, const Tensor& seed);
  // Scalar output, seed 1.
  void backward(Var output);

  const Shape& shape(Var v) const { return nodes_.at(v.id()).shape; }
  const Tensor& value(Var v) const;
  // Gradient of the last backward() w.r.t. v; zeros if v was not reached.
  const Tensor& grad(Var v) const;

  // Per-feature batch mean and biased variance computed by a training-mode
  // batch_norm node during the last evaluate().
  const Tensor& batch_mean(Var bn) const;
  const Tensor& batch_var(Var bn) const;

  std::size_t size() const { return nodes_.size(); }

  // Internal node factory used by the op functions below.
  Var add_node(OpKind op, std::vector<std::size_t> parents, Shape shape,
               double a = 0.0, double b = 0.0, std::size_t i0 = 0,
               std::size_t i1 = 0);
  // Auxiliary constant tensors for ops such as batch_norm_eval.
  void set_aux(Var v, std::vector<Tensor> aux);

 private:
  struct Node {
    OpKind op = OpKind::kLeaf;
    std::vector<std::size_t> parents;
    Shape shape;
    Tensor value;
    mutable Tensor grad;
    bool requires_grad = false;
    double a = 0.0;
    double b = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    std::vector<Tensor> aux;
  };

  void forward_node(Node& node);
  void backward_node(Node& node);
  Tensor& grad_slot(std::size_t id);

  std::vector<Node> nodes_;
  std::size_t evaluated_upto_ = 0;
  std::vector<bool> has_grad_;
  bool backward_done_ = false;
};

// ---- Operations ----------------------------------------------------------
// All operations require operands from the same graph.

// a: [..., k], b: [k, n] -> [..., n]. Leading dimensions of `a` are treated as
// rows, so a batch of activations multiplies a shared weight matrix.
Var matmul(Var a, Var b);
// s: [R, K], x: [..., K, n] -> [..., R, n]; s left-multiplies every K x n
// block of x. With R = K this is the node-mixing product of a graph layer.
Var graph_mix(Var s, Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// x: [..., n] + bias: [n], broadcast over leading dimensions.
Var add_bias(Var x, Var bias);
Var scale(Var x, double factor);
Var add_scalar(Var x, double offset);
Var tanh(Var x);
Var relu(Var x);
Var exp(Var x);
Var log(Var x);
Var square(Var x);
// Square root; the derivative at exactly 0 is taken as 0.
Var sqrt(Var x);
Var abs(Var x);
// Elementwise clamp; the gradient is passed where lo <= x <= hi.
Var clamp(Var x, double lo, double hi);
Var sum(Var x);
Var mean(Var x);
// Training-mode batch normalisation of x: [B, F...] over axis 0 with
// per-feature scale gamma and shift beta of shape [F...]. Gradients flow
// through the batch statistics.
Var batch_norm(Var x, Var gamma, Var beta, double eps);
// Inference-mode normalisation using fixed running statistics.
Var batch_norm_eval(Var x, Var gamma, Var beta, const Tensor& running_mean,
                    const Tensor& running_var, double eps);
// x * mask, where mask is a constant leaf of the same shape already scaled by
// the inverse keep probability.
Var dropout(Var x, Var mask);
// Columns [begin, end) of the last axis.
Var slice_last(Var x, std::size_t begin, std::size_t end);
Var concat_last(const std::vector<Var>& parts);
Var reshape(Var x, Shape shape);
// Log-softmax over the last axis.
Var log_softmax(Var x);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(Var a, double f) { return scale(a, f); }
inline Var operator*(double f, Var a) { return scale(a, f); }

}  // namespace motionood

#endif  // MOTIONOOD_AUTODIFF_HPP_
