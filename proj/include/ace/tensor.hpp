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

#ifndef ACE_TENSOR_HPP_
#define ACE_TENSOR_HPP_

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ace {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major dense shapes; rank 1 and 2 are what the model uses.
using Shape = std::vector<int>;

int shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

enum class OpKind {
  kLeaf,
  kMatmul,
  kAdd,
  kMul,
  kConcat,
  kTanh,
  kRelu,
  kSigmoid,
  kLogSumExp,
  kMaxPool,
  kScale,
  kEmbeddingLookup,
  kDropout,
  kGradReverse,
  kReshape,
};

const char* op_name(OpKind k);

// One node of the computation DAG. Interior nodes hold their inputs by
// shared_ptr, so a graph stays alive exactly as long as some tensor
// referencing it does.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // leaves: allocated iff requires_grad
  bool requires_grad = false;
  OpKind op = OpKind::kLeaf;
  std::vector<std::shared_ptr<Node>> inputs;

  // Op attributes.
  int axis = 0;
  double alpha = 0.0;           // scale factor / grad-reversal lambda
  std::vector<int> indices;     // embedding_lookup row ids
  std::vector<double> mask;     // dropout keep mask, already 1/(1-p) scaled

  std::string name;  // parameter name, empty for anonymous nodes

  int numel() const { return static_cast<int>(value.size()); }
  int rows() const { return shape.empty() ? 1 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  void ensure_grad();  // allocate + zero if absent
};

// Value-semantics handle onto a Node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Tensor leaf(Shape shape, std::vector<double> values,
                     bool requires_grad = false, std::string name = "");
  static Tensor zeros(Shape shape, bool requires_grad = false,
                      std::string name = "");
  static Tensor scalar(double v);  // constant, shape {1}

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int numel() const { return node_->numel(); }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int rows() const { return node_->rows(); }
  int cols() const { return node_->cols(); }
  bool requires_grad() const { return node_->requires_grad; }
  const std::string& name() const { return node_->name; }

  std::span<const double> value() const { return node_->value; }
  std::span<double> mutable_value() { return node_->value; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad; }

  // Scalar-shaped convenience accessor.
  double item() const;

  void zero_grad();

  const std::shared_ptr<Node>& node() const { return node_; }
  Node* raw() const { return node_.get(); }

 private:
  std::shared_ptr<Node> node_;
};

// Topologically ordered record of the operations reachable from a root:
// every node's inputs precede it in `order`.
struct CompGraph {
  std::vector<Node*> order;
  static CompGraph from_root(const Tensor& root);
};

// Reverse-mode sweep. `root` must be scalar-shaped; gradients are
// accumulated (+=) into the grad buffers of every requires_grad leaf below
// it, so callers zero leaf grads between independent passes.
void backward(const Tensor& root);

}  // namespace ace

#endif  // ACE_TENSOR_HPP_
