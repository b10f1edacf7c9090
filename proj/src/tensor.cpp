/* Copyright 2026 ACE Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ace/tensor.hpp"

#include <unordered_set>
#include <utility>

namespace ace {

int shape_numel(const Shape& s) {
  int n = 1;
  for (int e : s) n *= e;
  return n;
}

std::string shape_str(const Shape& s) {
  if (s.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out;
}

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kConcat: return "concat";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kLogSumExp: return "log_sum_exp";
    case OpKind::kMaxPool: return "max_pool";
    case OpKind::kScale: return "scale";
    case OpKind::kEmbeddingLookup: return "embedding_lookup";
    case OpKind::kDropout: return "dropout";
    case OpKind::kGradReverse: return "grad_reverse";
    case OpKind::kReshape: return "reshape";
  }
  return "unknown";
}

void Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw Error("tensor shape must have at least one extent");
  for (int e : shape)
    if (e <= 0)
      throw Error("tensor extents must be positive, got " + shape_str(shape));
}

}  // namespace

Tensor Tensor::leaf(Shape shape, std::vector<double> values, bool requires_grad,
                    std::string name) {
  validate_shape(shape);
  if (shape_numel(shape) != static_cast<int>(values.size()))
    throw Error("tensor values length " + std::to_string(values.size()) +
                " does not match shape " + shape_str(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = requires_grad;
  n->name = std::move(name);
  if (requires_grad) n->ensure_grad();
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad, std::string name) {
  validate_shape(shape);
  return leaf(shape, std::vector<double>(shape_numel(shape), 0.0),
              requires_grad, std::move(name));
}

Tensor Tensor::scalar(double v) { return leaf({1}, {v}); }

double Tensor::item() const {
  if (numel() != 1)
    throw Error("item() on tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (node_->requires_grad) node_->grad.assign(node_->value.size(), 0.0);
}

CompGraph CompGraph::from_root(const Tensor& root) {
  CompGraph g;
  if (!root.defined()) return g;
  std::unordered_set<Node*> done;
  // Iterative post-order DFS; (node, next-input-index) frames.
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.raw(), 0);
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (done.count(node)) {
      stack.pop_back();
      continue;
    }
    if (idx < node->inputs.size()) {
      Node* child = node->inputs[idx++].get();
      if (!done.count(child)) stack.emplace_back(child, 0);
    } else {
      done.insert(node);
      g.order.push_back(node);
      stack.pop_back();
    }
  }
  return g;
}

}  // namespace ace
