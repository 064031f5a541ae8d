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

#include "motionood/autodiff.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "motionood/error.hpp"

namespace motionood {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::size_t last_dim(const Shape& s) { return s.empty() ? 1 : s.back(); }

void require_same_graph(Var a, Var b, const char* op) {
  if (!a.valid() || !b.valid() || &a.graph() != &b.graph()) {
    throw UsageError(std::string(op) + ": operands belong to different graphs");
  }
}

void require_same_shape(Var a, Var b, const char* op) {
  require_same_graph(a, b, op);
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  }
}

Var unary(OpKind op, Var x, double a = 0.0, double b = 0.0) {
  if (!x.valid()) throw UsageError(std::string(op_name(op)) + ": invalid operand");
  return x.graph().add_node(op, {x.id()}, x.shape(), a, b);
}

}  // namespace

std::string_view op_name(OpKind op) {
  switch (op) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kGraphMix: return "graph_mix";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kAddBias: return "add_bias";
    case OpKind::kScale: return "scale";
    case OpKind::kAddScalar: return "add_scalar";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSquare: return "square";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kAbs: return "abs";
    case OpKind::kClamp: return "clamp";
    case OpKind::kSum: return "sum";
    case OpKind::kBatchNorm: return "batch_norm";
    case OpKind::kBatchNormEval: return "batch_norm_eval";
    case OpKind::kDropoutMask: return "dropout";
    case OpKind::kSlice: return "slice";
    case OpKind::kConcat: return "concat";
    case OpKind::kReshape: return "reshape";
    case OpKind::kLogSoftmax: return "log_softmax";
  }
  return "unknown";
}

const Shape& Var::shape() const { return graph_->shape(*this); }
const Tensor& Var::value() const { return graph_->value(*this); }
const Tensor& Var::grad() const { return graph_->grad(*this); }

// ---- Graph ---------------------------------------------------------------

Var Graph::parameter(Tensor value) {
  Var v = add_node(OpKind::kLeaf, {}, value.shape());
  nodes_[v.id()].value = std::move(value);
  nodes_[v.id()].requires_grad = true;
  return v;
}

Var Graph::constant(Tensor value) {
  Var v = add_node(OpKind::kLeaf, {}, value.shape());
  nodes_[v.id()].value = std::move(value);
  return v;
}

Var Graph::add_node(OpKind op, std::vector<std::size_t> parents, Shape shape,
                    double a, double b, std::size_t i0, std::size_t i1) {
  Node node;
  node.op = op;
  node.shape = std::move(shape);
  node.a = a;
  node.b = b;
  node.i0 = i0;
  node.i1 = i1;
  for (std::size_t p : parents) {
    if (p >= nodes_.size()) throw UsageError("node parent out of range");
    node.requires_grad = node.requires_grad || nodes_[p].requires_grad;
  }
  node.parents = std::move(parents);
  nodes_.push_back(std::move(node));
  backward_done_ = false;
  return Var(this, nodes_.size() - 1);
}

void Graph::set_aux(Var v, std::vector<Tensor> aux) {
  nodes_.at(v.id()).aux = std::move(aux);
}

void Graph::set_value(Var leaf, Tensor value) {
  Node& node = nodes_.at(leaf.id());
  if (node.op != OpKind::kLeaf) throw UsageError("set_value on a non-leaf node");
  if (value.shape() != node.shape) {
    throw ShapeError("set_value: expected " + shape_string(node.shape) +
                     ", got " + shape_string(value.shape()));
  }
  node.value = std::move(value);
  evaluated_upto_ = std::min(evaluated_upto_, leaf.id());
  backward_done_ = false;
}

bool Graph::is_leaf(Var v) const { return nodes_.at(v.id()).op == OpKind::kLeaf; }

bool Graph::requires_grad(Var v) const {
  return nodes_.at(v.id()).requires_grad;
}

const Tensor& Graph::value(Var v) const {
  if (!evaluated(v)) {
    throw UsageError("value of node " + std::to_string(v.id()) +
                     " requested before evaluate()");
  }
  return nodes_[v.id()].value;
}

const Tensor& Graph::evaluate(Var output) {
  if (!output.valid() || &output.graph() != this) {
    throw UsageError("evaluate: output does not belong to this graph");
  }
  for (std::size_t id = evaluated_upto_; id <= output.id(); ++id) {
    Node& node = nodes_[id];
    if (node.op != OpKind::kLeaf) forward_node(node);
    if (!node.value.all_finite()) {
      evaluated_upto_ = id;
      throw NumericError("non-finite value produced by " +
                         std::string(op_name(node.op)) + " (node " +
                         std::to_string(id) + ")");
    }
  }
  evaluated_upto_ = std::max(evaluated_upto_, output.id() + 1);
  return nodes_[output.id()].value;
}

Tensor& Graph::grad_slot(std::size_t id) {
  if (!has_grad_[id]) {
    nodes_[id].grad = Tensor(nodes_[id].shape, 0.0);
    has_grad_[id] = true;
  }
  return nodes_[id].grad;
}

void Graph::backward(Var output, const Tensor& seed) {
  if (!evaluated(output)) {
    throw UsageError("backward called before evaluate() on node " +
                     std::to_string(output.id()));
  }
  if (seed.shape() != shape(output)) {
    throw ShapeError("backward seed " + shape_string(seed.shape()) +
                     " does not match output " + shape_string(shape(output)));
  }
  has_grad_.assign(nodes_.size(), false);
  for (auto& node : nodes_) node.grad = Tensor();
  if (nodes_[output.id()].requires_grad) {
    grad_slot(output.id()) = seed;
    for (std::size_t id = output.id() + 1; id-- > 0;) {
      if (has_grad_[id] && nodes_[id].op != OpKind::kLeaf) {
        backward_node(nodes_[id]);
      }
    }
  }
  backward_done_ = true;
}

void Graph::backward(Var output) {
  if (shape_size(shape(output)) != 1) {
    throw ShapeError("backward without seed requires a scalar output, got " +
                     shape_string(shape(output)));
  }
  backward(output, Tensor(shape(output), 1.0));
}

const Tensor& Graph::grad(Var v) const {
  if (!backward_done_) throw UsageError("grad requested before backward()");
  if (v.id() < has_grad_.size() && has_grad_[v.id()]) return nodes_[v.id()].grad;
  // Zero gradient for unreached nodes, materialised on demand.
  const Node& node = nodes_.at(v.id());
  if (node.grad.shape() != node.shape || node.grad.empty()) {
    node.grad = Tensor(node.shape, 0.0);
  }
  return node.grad;
}

const Tensor& Graph::batch_mean(Var bn) const {
  const Node& node = nodes_.at(bn.id());
  if (node.op != OpKind::kBatchNorm || !evaluated(bn)) {
    throw UsageError("batch_mean requires an evaluated batch_norm node");
  }
  return node.aux[0];
}

const Tensor& Graph::batch_var(Var bn) const {
  const Node& node = nodes_.at(bn.id());
  if (node.op != OpKind::kBatchNorm || !evaluated(bn)) {
    throw UsageError("batch_var requires an evaluated batch_norm node");
  }
  return node.aux[1];
}

// ---- Forward kernels -----------------------------------------------------

void Graph::forward_node(Node& node) {
  auto in = [&](std::size_t i) -> const Tensor& {
    return nodes_[node.parents[i]].value;
  };
  if (node.value.shape() != node.shape || node.value.size() != shape_size(node.shape)) {
    node.value = Tensor(node.shape);
  }
  Tensor& out = node.value;
  const std::size_t n = out.size();

  switch (node.op) {
    case OpKind::kLeaf:
      break;
    case OpKind::kMatMul: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      const std::size_t k = b.dim(0), cols = b.dim(1), rows = a.size() / k;
      MatrixMap(out.data(), rows, cols).noalias() =
          ConstMatrixMap(a.data(), rows, k) * ConstMatrixMap(b.data(), k, cols);
      break;
    }
    case OpKind::kGraphMix: {
      const Tensor& s = in(0);
      const Tensor& x = in(1);
      const std::size_t rows = s.dim(0), nodes = s.dim(1);
      const std::size_t width = last_dim(x.shape());
      const std::size_t block = nodes * width, blocks = x.size() / block;
      ConstMatrixMap sm(s.data(), rows, nodes);
      for (std::size_t b = 0; b < blocks; ++b) {
        MatrixMap(out.data() + b * rows * width, rows, width).noalias() =
            sm * ConstMatrixMap(x.data() + b * block, nodes, width);
      }
      break;
    }
    case OpKind::kAdd:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] + in(1)[i];
      break;
    case OpKind::kSub:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] - in(1)[i];
      break;
    case OpKind::kMul:
    case OpKind::kDropoutMask:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] * in(1)[i];
      break;
    case OpKind::kAddBias: {
      const Tensor& x = in(0);
      const Tensor& bias = in(1);
      const std::size_t w = bias.size();
      for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + bias[i % w];
      break;
    }
    case OpKind::kScale:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] * node.a;
      break;
    case OpKind::kAddScalar:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] + node.a;
      break;
    case OpKind::kTanh:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(in(0)[i]);
      break;
    case OpKind::kRelu:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::max(in(0)[i], 0.0);
      break;
    case OpKind::kExp:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(in(0)[i]);
      break;
    case OpKind::kLog:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::log(in(0)[i]);
      break;
    case OpKind::kSquare:
      for (std::size_t i = 0; i < n; ++i) out[i] = in(0)[i] * in(0)[i];
      break;
    case OpKind::kSqrt:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(in(0)[i]);
      break;
    case OpKind::kAbs:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(in(0)[i]);
      break;
    case OpKind::kClamp:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::clamp(in(0)[i], node.a, node.b);
      }
      break;
    case OpKind::kSum: {
      double s = 0.0;
      for (double v : in(0).values()) s += v;
      out[0] = s;
      break;
    }
    case OpKind::kBatchNorm: {
      const Tensor& x = in(0);
      const Tensor& gamma = in(1);
      const Tensor& beta = in(2);
      const std::size_t batch = x.dim(0), features = gamma.size();
      Tensor mu(gamma.shape(), 0.0), var(gamma.shape(), 0.0);
      Tensor inv_std(gamma.shape()), xhat(x.shape());
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < features; ++f) mu[f] += x[b * features + f];
      }
      for (std::size_t f = 0; f < features; ++f) mu[f] /= double(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < features; ++f) {
          const double d = x[b * features + f] - mu[f];
          var[f] += d * d;
        }
      }
      for (std::size_t f = 0; f < features; ++f) {
        var[f] /= double(batch);
        inv_std[f] = 1.0 / std::sqrt(var[f] + node.a);
      }
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < features; ++f) {
          const std::size_t i = b * features + f;
          xhat[i] = (x[i] - mu[f]) * inv_std[f];
          out[i] = gamma[f] * xhat[i] + beta[f];
        }
      }
      node.aux = {std::move(mu), std::move(var), std::move(inv_std),
                  std::move(xhat)};
      break;
    }
    case OpKind::kBatchNormEval: {
      const Tensor& x = in(0);
      const Tensor& gamma = in(1);
      const Tensor& beta = in(2);
      const Tensor& rm = node.aux[0];
      const Tensor& rv = node.aux[1];
      const std::size_t features = gamma.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t f = i % features;
        out[i] = gamma[f] * (x[i] - rm[f]) / std::sqrt(rv[f] + node.a) + beta[f];
      }
      break;
    }
    case OpKind::kSlice: {
      const Tensor& x = in(0);
      const std::size_t w_in = last_dim(x.shape()), w_out = node.i1 - node.i0;
      const std::size_t rows = x.size() / w_in;
      for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(x.data() + r * w_in + node.i0, w_out, out.data() + r * w_out);
      }
      break;
    }
    case OpKind::kConcat: {
      const std::size_t w_out = last_dim(node.shape);
      const std::size_t rows = n / w_out;
      std::size_t offset = 0;
      for (std::size_t p = 0; p < node.parents.size(); ++p) {
        const Tensor& x = in(p);
        const std::size_t w = last_dim(x.shape());
        for (std::size_t r = 0; r < rows; ++r) {
          std::copy_n(x.data() + r * w, w, out.data() + r * w_out + offset);
        }
        offset += w;
      }
      break;
    }
    case OpKind::kReshape:
      std::copy_n(in(0).data(), n, out.data());
      break;
    case OpKind::kLogSoftmax: {
      const Tensor& x = in(0);
      const std::size_t w = last_dim(x.shape()), rows = n / w;
      for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.data() + r * w;
        const double m = *std::max_element(xr, xr + w);
        double s = 0.0;
        for (std::size_t j = 0; j < w; ++j) s += std::exp(xr[j] - m);
        const double lse = m + std::log(s);
        for (std::size_t j = 0; j < w; ++j) out[r * w + j] = xr[j] - lse;
      }
      break;
    }
  }
}

// ---- Backward kernels ----------------------------------------------------

void Graph::backward_node(Node& node) {
  const Tensor& dy = node.grad;
  const std::size_t n = dy.size();
  auto parent_needs = [&](std::size_t i) {
    return nodes_[node.parents[i]].requires_grad;
  };
  auto in = [&](std::size_t i) -> const Tensor& {
    return nodes_[node.parents[i]].value;
  };
  auto dparent = [&](std::size_t i) -> Tensor& {
    return grad_slot(node.parents[i]);
  };

  switch (node.op) {
    case OpKind::kLeaf:
      break;
    case OpKind::kMatMul: {
      const Tensor& a = in(0);
      const Tensor& b = in(1);
      const std::size_t k = b.dim(0), cols = b.dim(1), rows = a.size() / k;
      ConstMatrixMap dym(dy.data(), rows, cols);
      if (parent_needs(0)) {
        MatrixMap(dparent(0).data(), rows, k).noalias() +=
            dym * ConstMatrixMap(b.data(), k, cols).transpose();
      }
      if (parent_needs(1)) {
        MatrixMap(dparent(1).data(), k, cols).noalias() +=
            ConstMatrixMap(a.data(), rows, k).transpose() * dym;
      }
      break;
    }
    case OpKind::kGraphMix: {
      const Tensor& s = in(0);
      const Tensor& x = in(1);
      const std::size_t rows = s.dim(0), nodes = s.dim(1);
      const std::size_t width = last_dim(x.shape());
      const std::size_t block = nodes * width, blocks = x.size() / block;
      ConstMatrixMap sm(s.data(), rows, nodes);
      for (std::size_t b = 0; b < blocks; ++b) {
        ConstMatrixMap dyb(dy.data() + b * rows * width, rows, width);
        if (parent_needs(0)) {
          MatrixMap(dparent(0).data(), rows, nodes).noalias() +=
              dyb * ConstMatrixMap(x.data() + b * block, nodes, width).transpose();
        }
        if (parent_needs(1)) {
          MatrixMap(dparent(1).data() + b * block, nodes, width).noalias() +=
              sm.transpose() * dyb;
        }
      }
      break;
    }
    case OpKind::kAdd:
      if (parent_needs(0)) {
        Tensor& g = dparent(0);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      }
      if (parent_needs(1)) {
        Tensor& g = dparent(1);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      }
      break;
    case OpKind::kSub:
      if (parent_needs(0)) {
        Tensor& g = dparent(0);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      }
      if (parent_needs(1)) {
        Tensor& g = dparent(1);
        for (std::size_t i = 0; i < n; ++i) g[i] -= dy[i];
      }
      break;
    case OpKind::kMul:
    case OpKind::kDropoutMask:
      if (parent_needs(0)) {
        Tensor& g = dparent(0);
        const Tensor& other = in(1);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] * other[i];
      }
      if (parent_needs(1)) {
        Tensor& g = dparent(1);
        const Tensor& other = in(0);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] * other[i];
      }
      break;
    case OpKind::kAddBias:
      if (parent_needs(0)) {
        Tensor& g = dparent(0);
        for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      }
      if (parent_needs(1)) {
        Tensor& g = dparent(1);
        const std::size_t w = g.size();
        for (std::size_t i = 0; i < n; ++i) g[i % w] += dy[i];
      }
      break;
    case OpKind::kScale: {
      Tensor& g = dparent(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] * node.a;
      break;
    }
    case OpKind::kAddScalar:
    case OpKind::kReshape: {
      Tensor& g = dparent(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[i];
      break;
    }
    case OpKind::kTanh: {
      Tensor& g = dparent(0);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = node.value[i];
        g[i] += dy[i] * (1.0 - y * y);
      }
      break;
    }
    case OpKind::kRelu: {
      Tensor& g = dparent(0);
      const Tensor& x = in(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += x[i] > 0.0 ? dy[i] : 0.0;
      break;
    }
    case OpKind::kExp: {
      Tensor& g = dparent(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] * node.value[i];
      break;
    }
    case OpKind::kLog: {
      Tensor& g = dparent(0);
      const Tensor& x = in(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += dy[i] / x[i];
      break;
    }
    case OpKind::kSquare: {
      Tensor& g = dparent(0);
      const Tensor& x = in(0);
      for (std::size_t i = 0; i < n; ++i) g[i] += 2.0 * x[i] * dy[i];
      break;
    }
    case OpKind::kSqrt: {
      Tensor& g = dparent(0);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = node.value[i];
        if (y > 0.0) g[i] += 0.5 * dy[i] / y;
      }
      break;
    }
    case OpKind::kAbs: {
      Tensor& g = dparent(0);
      const Tensor& x = in(0);
      for (std::size_t i = 0; i < n; ++i) {
        g[i] += x[i] > 0.0 ? dy[i] : (x[i] < 0.0 ? -dy[i] : 0.0);
      }
      break;
    }
    case OpKind::kClamp: {
      Tensor& g = dparent(0);
      const Tensor& x = in(0);
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] >= node.a && x[i] <= node.b) g[i] += dy[i];
      }
      break;
    }
    case OpKind::kSum: {
      Tensor& g = dparent(0);
      const double d = dy[0];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += d;
      break;
    }
    case OpKind::kBatchNorm: {
      const Tensor& gamma = in(1);
      const Tensor& inv_std = node.aux[2];
      const Tensor& xhat = node.aux[3];
      const std::size_t features = gamma.size(), batch = n / features;
      Tensor dgamma(gamma.shape(), 0.0), dbeta(gamma.shape(), 0.0);
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t f = 0; f < features; ++f) {
          const std::size_t i = b * features + f;
          dbeta[f] += dy[i];
          dgamma[f] += dy[i] * xhat[i];
        }
      }
      if (parent_needs(0)) {
        Tensor& g = dparent(0);
        const double inv_batch = 1.0 / double(batch);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t f = 0; f < features; ++f) {
            const std::size_t i = b * features + f;
            g[i] += gamma[f] * inv_std[f] * inv_batch *
                    (double(batch) * dy[i] - dbeta[f] - xhat[i] * dgamma[f]);
          }
        }
      }
      if (parent_needs(1)) {
        Tensor& g = dparent(1);
        for (std::size_t f = 0; f < features; ++f) g[f] += dgamma[f];
      }
      if (parent_needs(2)) {
        Tensor& g = dparent(2);
        for (std::size_t f = 0; f < features; ++f) g[f] += dbeta[f];
      }
      break;
    }
    case OpKind::kBatchNormEval: {
      const Tensor& x = in(0);
      const Tensor& gamma = in(1);
      const Tensor& rm = node.aux[0];
      const Tensor& rv = node.aux[1];
      const std::size_t features = gamma.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t f = i % features;
        const double inv = 1.0 / std::sqrt(rv[f] + node.a);
        if (parent_needs(0)) dparent(0)[i] += dy[i] * gamma[f] * inv;
        if (parent_needs(1)) dparent(1)[f] += dy[i] * (x[i] - rm[f]) * inv;
        if (parent_needs(2)) dparent(2)[f] += dy[i];
      }
      break;
    }
    case OpKind::kSlice: {
      Tensor& g = dparent(0);
      const std::size_t w_in = last_dim(g.shape()), w_out = node.i1 - node.i0;
      const std::size_t rows = g.size() / w_in;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < w_out; ++j) {
          g[r * w_in + node.i0 + j] += dy[r * w_out + j];
        }
      }
      break;
    }
    case OpKind::kConcat: {
      const std::size_t w_out = last_dim(node.shape), rows = n / w_out;
      std::size_t offset = 0;
      for (std::size_t p = 0; p < node.parents.size(); ++p) {
        const std::size_t w = last_dim(nodes_[node.parents[p]].shape);
        if (parent_needs(p)) {
          Tensor& g = dparent(p);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < w; ++j) {
              g[r * w + j] += dy[r * w_out + offset + j];
            }
          }
        }
        offset += w;
      }
      break;
    }
    case OpKind::kLogSoftmax: {
      Tensor& g = dparent(0);
      const std::size_t w = last_dim(node.shape), rows = n / w;
      for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < w; ++j) s += dy[r * w + j];
        for (std::size_t j = 0; j < w; ++j) {
          const std::size_t i = r * w + j;
          g[i] += dy[i] - std::exp(node.value[i]) * s;
        }
      }
      break;
    }
  }
}

// ---- Op constructors -----------------------------------------------------

Var matmul(Var a, Var b) {
  require_same_graph(a, b, "matmul");
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.empty() || sb.size() != 2 || sa.back() != sb[0]) {
    throw ShapeError("matmul: " + shape_string(sa) + " x " + shape_string(sb));
  }
  Shape out = sa;
  out.back() = sb[1];
  return a.graph().add_node(OpKind::kMatMul, {a.id(), b.id()}, std::move(out));
}

Var graph_mix(Var s, Var x) {
  require_same_graph(s, x, "graph_mix");
  const Shape& ss = s.shape();
  const Shape& sx = x.shape();
  if (ss.size() != 2 || sx.size() < 2 || sx[sx.size() - 2] != ss[1]) {
    throw ShapeError("graph_mix: " + shape_string(ss) + " x " + shape_string(sx));
  }
  Shape out = sx;
  out[out.size() - 2] = ss[0];
  return s.graph().add_node(OpKind::kGraphMix, {s.id(), x.id()}, std::move(out));
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  return a.graph().add_node(OpKind::kAdd, {a.id(), b.id()}, a.shape());
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  return a.graph().add_node(OpKind::kSub, {a.id(), b.id()}, a.shape());
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  return a.graph().add_node(OpKind::kMul, {a.id(), b.id()}, a.shape());
}

Var add_bias(Var x, Var bias) {
  require_same_graph(x, bias, "add_bias");
  if (bias.shape().size() != 1 || x.shape().empty() ||
      x.shape().back() != bias.shape()[0]) {
    throw ShapeError("add_bias: " + shape_string(x.shape()) + " + " +
                     shape_string(bias.shape()));
  }
  return x.graph().add_node(OpKind::kAddBias, {x.id(), bias.id()}, x.shape());
}

Var scale(Var x, double factor) { return unary(OpKind::kScale, x, factor); }
Var add_scalar(Var x, double offset) {
  return unary(OpKind::kAddScalar, x, offset);
}
Var tanh(Var x) { return unary(OpKind::kTanh, x); }
Var relu(Var x) { return unary(OpKind::kRelu, x); }
Var exp(Var x) { return unary(OpKind::kExp, x); }
Var log(Var x) { return unary(OpKind::kLog, x); }
Var square(Var x) { return unary(OpKind::kSquare, x); }
Var sqrt(Var x) { return unary(OpKind::kSqrt, x); }
Var abs(Var x) { return unary(OpKind::kAbs, x); }

Var clamp(Var x, double lo, double hi) {
  if (!(lo <= hi)) throw UsageError("clamp: lo must not exceed hi");
  return unary(OpKind::kClamp, x, lo, hi);
}

Var sum(Var x) {
  if (!x.valid()) throw UsageError("sum: invalid operand");
  return x.graph().add_node(OpKind::kSum, {x.id()}, Shape{});
}

Var mean(Var x) {
  return scale(sum(x), 1.0 / double(shape_size(x.shape())));
}

Var batch_norm(Var x, Var gamma, Var beta, double eps) {
  require_same_shape(gamma, beta, "batch_norm");
  require_same_graph(x, gamma, "batch_norm");
  const Shape& sx = x.shape();
  if (sx.size() < 2 || Shape(sx.begin() + 1, sx.end()) != gamma.shape()) {
    throw ShapeError("batch_norm: input " + shape_string(sx) +
                     " incompatible with scale " + shape_string(gamma.shape()));
  }
  return x.graph().add_node(OpKind::kBatchNorm, {x.id(), gamma.id(), beta.id()},
                            sx, eps);
}

Var batch_norm_eval(Var x, Var gamma, Var beta, const Tensor& running_mean,
                    const Tensor& running_var, double eps) {
  require_same_shape(gamma, beta, "batch_norm_eval");
  require_same_graph(x, gamma, "batch_norm_eval");
  const Shape& sx = x.shape();
  if (sx.size() < 2 || Shape(sx.begin() + 1, sx.end()) != gamma.shape() ||
      running_mean.shape() != gamma.shape() ||
      running_var.shape() != gamma.shape()) {
    throw ShapeError("batch_norm_eval: input " + shape_string(sx) +
                     " incompatible with scale " + shape_string(gamma.shape()));
  }
  Var v = x.graph().add_node(OpKind::kBatchNormEval,
                             {x.id(), gamma.id(), beta.id()}, sx, eps);
  x.graph().set_aux(v, {running_mean, running_var});
  return v;
}

Var dropout(Var x, Var mask) {
  require_same_shape(x, mask, "dropout");
  if (mask.graph().requires_grad(mask)) {
    throw UsageError("dropout: mask must be a constant leaf");
  }
  return x.graph().add_node(OpKind::kDropoutMask, {x.id(), mask.id()}, x.shape());
}

Var slice_last(Var x, std::size_t begin, std::size_t end) {
  if (!x.valid()) throw UsageError("slice_last: invalid operand");
  Shape s = x.shape();
  if (s.empty() || begin >= end || end > s.back()) {
    throw ShapeError("slice_last: [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") of " + shape_string(s));
  }
  s.back() = end - begin;
  return x.graph().add_node(OpKind::kSlice, {x.id()}, std::move(s), 0.0, 0.0,
                            begin, end);
}

Var concat_last(const std::vector<Var>& parts) {
  if (parts.empty()) throw UsageError("concat_last: no operands");
  Shape s = parts[0].shape();
  if (s.empty()) throw ShapeError("concat_last: scalar operand");
  std::vector<std::size_t> ids;
  std::size_t width = 0;
  for (const Var& p : parts) {
    require_same_graph(parts[0], p, "concat_last");
    const Shape& sp = p.shape();
    if (sp.size() != s.size() ||
        !std::equal(sp.begin(), sp.end() - 1, s.begin())) {
      throw ShapeError("concat_last: " + shape_string(sp) + " vs " +
                       shape_string(s));
    }
    width += sp.back();
    ids.push_back(p.id());
  }
  s.back() = width;
  return parts[0].graph().add_node(OpKind::kConcat, std::move(ids), std::move(s));
}

Var reshape(Var x, Shape shape) {
  if (!x.valid()) throw UsageError("reshape: invalid operand");
  if (shape_size(shape) != shape_size(x.shape())) {
    throw ShapeError("reshape: " + shape_string(x.shape()) + " to " +
                     shape_string(shape));
  }
  return x.graph().add_node(OpKind::kReshape, {x.id()}, std::move(shape));
}

Var log_softmax(Var x) {
  if (!x.valid() || x.shape().empty()) {
    throw ShapeError("log_softmax: needs at least one axis");
  }
  return x.graph().add_node(OpKind::kLogSoftmax, {x.id()}, x.shape());
}

}  // namespace motionood
