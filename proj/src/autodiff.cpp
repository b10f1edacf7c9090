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

#include "ace/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>

#include "ace/kernels.hpp"

namespace ace::ops {
namespace {

using kernels::active;

std::shared_ptr<Node> make_node(OpKind op, Shape shape,
                                std::vector<Tensor> inputs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->shape = std::move(shape);
  n->value.assign(shape_numel(n->shape), 0.0);
  n->inputs.reserve(inputs.size());
  for (const auto& t : inputs) {
    if (!t.defined()) throw Error(std::string(op_name(op)) + ": undefined input");
    n->requires_grad = n->requires_grad || t.requires_grad();
    n->inputs.push_back(t.node());
  }
  return n;
}

[[noreturn]] void shape_error(OpKind op, const std::string& detail) {
  throw Error(std::string(op_name(op)) + ": " + detail);
}

struct MatmulDims {
  int m, k, n;
  Shape out;
};

MatmulDims matmul_dims(const Shape& a, const Shape& b) {
  if (a.size() > 2 || b.size() > 2 || a.empty() || b.empty())
    shape_error(OpKind::kMatmul,
                "rank-1/2 operands required, got " + shape_str(a) + " and " +
                    shape_str(b));
  const int m = a.size() == 2 ? a[0] : 1;
  const int ka = a.size() == 2 ? a[1] : a[0];
  const int kb = b.size() == 2 ? b[0] : b[0];
  const int n = b.size() == 2 ? b[1] : 1;
  if (ka != kb)
    shape_error(OpKind::kMatmul, "inner extents differ: " + shape_str(a) +
                                     " vs " + shape_str(b));
  MatmulDims d{m, ka, n, {}};
  if (a.size() == 2 && b.size() == 2)
    d.out = {m, n};
  else if (a.size() == 2)
    d.out = {m};
  else if (b.size() == 2)
    d.out = {n};
  else
    d.out = {1};
  return d;
}

// Bias-broadcast classification for add(): 0 = same shape, 1 = a is the
// matrix, 2 = b is the matrix.
int add_mode(const Shape& a, const Shape& b) {
  if (a == b) return 0;
  if (a.size() == 2 && b.size() == 1 && a[1] == b[0]) return 1;
  if (b.size() == 2 && a.size() == 1 && b[1] == a[0]) return 2;
  shape_error(OpKind::kAdd,
              "incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

void reduce_dims(OpKind op, const Shape& s, int axis, int* outer, int* inner,
                 Shape* out_shape) {
  if (s.size() == 1) {
    *outer = 1;
    *inner = s[0];
    *out_shape = {1};
    return;
  }
  if (s.size() != 2)
    shape_error(op, "rank-1/2 input required, got " + shape_str(s));
  if (axis != 0 && axis != 1)
    shape_error(op, "axis must be 0 or 1, got " + std::to_string(axis));
  if (axis == 0) {
    *outer = s[1];  // reduce rows, one result per column
    *inner = s[0];
    *out_shape = {1, s[1]};
  } else {
    *outer = s[0];
    *inner = s[1];
    *out_shape = {s[0], 1};
  }
}

// Iterates the reduced slices of a rank-1/2 tensor: axis 0 walks columns
// (stride = cols), axis 1 walks rows (stride = 1).
struct SliceIter {
  const double* base;
  int start_stride;  // distance between consecutive slices
  int step;          // distance between consecutive elements inside a slice
  const double* slice(int j) const { return base + j * start_stride; }
};

SliceIter slices(const Node& x, int axis) {
  if (x.shape.size() == 1) return {x.value.data(), 0, 1};
  if (axis == 0) return {x.value.data(), 1, x.shape[1]};
  return {x.value.data(), x.shape[1], 1};
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const auto d = matmul_dims(a.shape(), b.shape());
  auto n = make_node(OpKind::kMatmul, d.out, {a, b});
  active().matmul_nn(n->value.data(), a.value().data(), b.value().data(),
                     d.m, d.k, d.n);
  return Tensor(std::move(n));
}

Tensor add(const Tensor& a, const Tensor& b) {
  const int mode = add_mode(a.shape(), b.shape());
  const Tensor& mat = mode == 2 ? b : a;
  const Tensor& bias = mode == 2 ? a : b;
  auto n = make_node(OpKind::kAdd, mat.shape(), {a, b});
  if (mode == 0) {
    active().add(n->value.data(), a.value().data(), b.value().data(),
                 n->value.size());
  } else {
    const int rows = mat.rows(), cols = mat.cols();
    for (int i = 0; i < rows; ++i)
      active().add(n->value.data() + i * cols, mat.value().data() + i * cols,
                   bias.value().data(), cols);
  }
  n->axis = mode;
  return Tensor(std::move(n));
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) {
    auto n = make_node(OpKind::kMul, a.shape(), {a, b});
    active().mul(n->value.data(), a.value().data(), b.value().data(),
                 n->value.size());
    return Tensor(std::move(n));
  }
  if (a.numel() == 1 || b.numel() == 1) {
    const Tensor& big = a.numel() == 1 ? b : a;
    const Tensor& s = a.numel() == 1 ? a : b;
    auto n = make_node(OpKind::kMul, big.shape(), {a, b});
    active().scale(n->value.data(), big.value().data(), s.value()[0],
                   n->value.size());
    return Tensor(std::move(n));
  }
  shape_error(OpKind::kMul, "incompatible shapes " + shape_str(a.shape()) +
                                " and " + shape_str(b.shape()));
}

Tensor concat(const std::vector<Tensor>& xs, int axis) {
  if (xs.empty()) shape_error(OpKind::kConcat, "no inputs");
  const int rank = xs[0].rank();
  if (rank == 1 && axis != 0)
    shape_error(OpKind::kConcat, "rank-1 inputs concat along axis 0 only");
  if (axis != 0 && axis != 1)
    shape_error(OpKind::kConcat, "axis must be 0 or 1");
  int joined = 0;
  const int other = axis == 0 ? (rank == 2 ? xs[0].cols() : 0) : xs[0].rows();
  for (const auto& x : xs) {
    if (x.rank() != rank)
      shape_error(OpKind::kConcat, "mixed ranks among inputs");
    const int keep = axis == 0 ? (rank == 2 ? x.cols() : 0) : x.rows();
    if (keep != other)
      shape_error(OpKind::kConcat, "shape " + shape_str(x.shape()) +
                                       " does not align with " +
                                       shape_str(xs[0].shape()));
    joined += axis == 0 ? x.rows() : x.cols();
  }
  Shape out = rank == 1 ? Shape{joined}
              : axis == 0 ? Shape{joined, xs[0].cols()}
                          : Shape{xs[0].rows(), joined};
  auto n = make_node(OpKind::kConcat, out, xs);
  n->axis = axis;
  if (axis == 0 || rank == 1) {
    double* dst = n->value.data();
    for (const auto& x : xs) {
      std::memcpy(dst, x.value().data(), x.numel() * sizeof(double));
      dst += x.numel();
    }
  } else {
    const int rows = xs[0].rows();
    for (int i = 0; i < rows; ++i) {
      double* dst = n->value.data() + i * joined;
      for (const auto& x : xs) {
        std::memcpy(dst, x.value().data() + i * x.cols(),
                    x.cols() * sizeof(double));
        dst += x.cols();
      }
    }
  }
  return Tensor(std::move(n));
}

Tensor tanh(const Tensor& x) {
  auto n = make_node(OpKind::kTanh, x.shape(), {x});
  for (int i = 0; i < x.numel(); ++i) n->value[i] = std::tanh(x.value()[i]);
  return Tensor(std::move(n));
}

Tensor relu(const Tensor& x) {
  auto n = make_node(OpKind::kRelu, x.shape(), {x});
  active().relu(n->value.data(), x.value().data(), x.numel());
  return Tensor(std::move(n));
}

Tensor sigmoid(const Tensor& x) {
  auto n = make_node(OpKind::kSigmoid, x.shape(), {x});
  for (int i = 0; i < x.numel(); ++i) {
    const double v = x.value()[i];
    if (v >= 0.0) {
      n->value[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      n->value[i] = e / (1.0 + e);
    }
  }
  return Tensor(std::move(n));
}

Tensor log_sum_exp(const Tensor& x, int axis) {
  int outer, inner;
  Shape out;
  reduce_dims(OpKind::kLogSumExp, x.shape(), axis, &outer, &inner, &out);
  auto n = make_node(OpKind::kLogSumExp, out, {x});
  n->axis = axis;
  const auto it = slices(*x.raw(), axis);
  for (int j = 0; j < outer; ++j) {
    const double* s = it.slice(j);
    double m = s[0];
    for (int i = 1; i < inner; ++i) m = std::max(m, s[i * it.step]);
    double acc = 0.0;
    for (int i = 0; i < inner; ++i) acc += std::exp(s[i * it.step] - m);
    n->value[j] = m + std::log(acc);
  }
  return Tensor(std::move(n));
}

Tensor max_pool(const Tensor& x, int axis) {
  int outer, inner;
  Shape out;
  reduce_dims(OpKind::kMaxPool, x.shape(), axis, &outer, &inner, &out);
  auto n = make_node(OpKind::kMaxPool, out, {x});
  n->axis = axis;
  n->indices.resize(outer);
  const auto it = slices(*x.raw(), axis);
  for (int j = 0; j < outer; ++j) {
    const double* s = it.slice(j);
    int arg = 0;
    double m = s[0];
    for (int i = 1; i < inner; ++i) {
      const double v = s[i * it.step];
      if (v > m) {  // ties keep the first index
        m = v;
        arg = i;
      }
    }
    n->value[j] = m;
    n->indices[j] = arg;
  }
  return Tensor(std::move(n));
}

Tensor scale(const Tensor& x, double s) {
  auto n = make_node(OpKind::kScale, x.shape(), {x});
  n->alpha = s;
  active().scale(n->value.data(), x.value().data(), s, x.numel());
  return Tensor(std::move(n));
}

Tensor embedding_lookup(const Tensor& table, std::span<const int> ids) {
  if (table.rank() != 2)
    shape_error(OpKind::kEmbeddingLookup,
                "rank-2 table required, got " + shape_str(table.shape()));
  if (ids.empty()) shape_error(OpKind::kEmbeddingLookup, "empty id list");
  const int rows = table.rows(), d = table.cols();
  for (int id : ids)
    if (id < 0 || id >= rows)
      shape_error(OpKind::kEmbeddingLookup,
                  "row " + std::to_string(id) + " out of range for table " +
                      shape_str(table.shape()));
  auto n = make_node(OpKind::kEmbeddingLookup,
                     {static_cast<int>(ids.size()), d}, {table});
  n->indices.assign(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::memcpy(n->value.data() + i * d, table.value().data() + ids[i] * d,
                d * sizeof(double));
  return Tensor(std::move(n));
}

Tensor dropout(const Tensor& x, double rate, RngStream& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0)
    throw Error("dropout: rate must be in [0,1), got " + std::to_string(rate));
  if (!training) return x;
  auto n = make_node(OpKind::kDropout, x.shape(), {x});
  n->alpha = rate;
  n->mask.resize(x.numel());
  const double keep = 1.0 / (1.0 - rate);
  for (int i = 0; i < x.numel(); ++i)
    n->mask[i] = rng.next_bernoulli(1.0 - rate) ? keep : 0.0;
  active().mul(n->value.data(), x.value().data(), n->mask.data(), x.numel());
  return Tensor(std::move(n));
}

Tensor grad_reverse(const Tensor& x, double lambda) {
  auto n = make_node(OpKind::kGradReverse, x.shape(), {x});
  n->alpha = lambda;
  n->value = std::vector<double>(x.value().begin(), x.value().end());
  return Tensor(std::move(n));
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    shape_error(OpKind::kReshape, "cannot view " + shape_str(x.shape()) +
                                      " as " + shape_str(shape));
  auto n = make_node(OpKind::kReshape, std::move(shape), {x});
  n->value = std::vector<double>(x.value().begin(), x.value().end());
  return Tensor(std::move(n));
}

Tensor apply(OpKind kind, const std::vector<Tensor>& inputs,
             const OpAttrs& attrs) {
  auto unary = [&]() -> const Tensor& {
    if (inputs.size() != 1)
      throw Error(std::string(op_name(kind)) + ": expects one input");
    return inputs[0];
  };
  auto binary = [&](int i) -> const Tensor& {
    if (inputs.size() != 2)
      throw Error(std::string(op_name(kind)) + ": expects two inputs");
    return inputs[i];
  };
  switch (kind) {
    case OpKind::kMatmul: return matmul(binary(0), binary(1));
    case OpKind::kAdd: return add(binary(0), binary(1));
    case OpKind::kMul: return mul(binary(0), binary(1));
    case OpKind::kConcat: return concat(inputs, attrs.axis);
    case OpKind::kTanh: return tanh(unary());
    case OpKind::kRelu: return relu(unary());
    case OpKind::kSigmoid: return sigmoid(unary());
    case OpKind::kLogSumExp: return log_sum_exp(unary(), attrs.axis);
    case OpKind::kMaxPool: return max_pool(unary(), attrs.axis);
    case OpKind::kScale: return scale(unary(), attrs.alpha);
    case OpKind::kEmbeddingLookup:
      return embedding_lookup(unary(), attrs.indices);
    case OpKind::kDropout:
      if (!attrs.rng) throw Error("dropout: missing rng stream");
      return dropout(unary(), attrs.alpha, *attrs.rng, attrs.training);
    case OpKind::kGradReverse: return grad_reverse(unary(), attrs.alpha);
    case OpKind::kReshape: return reshape(unary(), attrs.shape);
    default:
      throw Error("apply: unknown op kind " +
                  std::to_string(static_cast<int>(kind)));
  }
}

// -- Backward ----------------------------------------------------------------

namespace {

double* grad_of(const std::shared_ptr<Node>& n) {
  return n->requires_grad ? n->grad.data() : nullptr;
}

void backward_node(Node* n) {
  const double* dy = n->grad.data();
  const auto& in = n->inputs;
  switch (n->op) {
    case OpKind::kLeaf:
      return;
    case OpKind::kMatmul: {
      const auto d = matmul_dims(in[0]->shape, in[1]->shape);
      if (double* da = grad_of(in[0]))
        active().matmul_nt(da, dy, in[1]->value.data(), d.m, d.k, d.n);
      if (double* db = grad_of(in[1]))
        active().matmul_tn(db, in[0]->value.data(), dy, d.m, d.k, d.n);
      return;
    }
    case OpKind::kAdd: {
      const int mode = n->axis;
      for (int which = 0; which < 2; ++which) {
        double* dx = grad_of(in[which]);
        if (!dx) continue;
        const bool is_bias = (mode == 1 && which == 1) ||
                             (mode == 2 && which == 0);
        if (!is_bias) {
          active().axpy(dx, 1.0, dy, n->value.size());
        } else {
          const int cols = in[which]->numel();
          const int rows = static_cast<int>(n->value.size()) / cols;
          for (int i = 0; i < rows; ++i)
            active().axpy(dx, 1.0, dy + i * cols, cols);
        }
      }
      return;
    }
    case OpKind::kMul: {
      const bool bcast = in[0]->shape != in[1]->shape;
      for (int which = 0; which < 2; ++which) {
        double* dx = grad_of(in[which]);
        if (!dx) continue;
        const Node& other = *in[1 - which];
        if (!bcast) {
          for (std::size_t i = 0; i < n->value.size(); ++i)
            dx[i] += dy[i] * other.value[i];
        } else if (in[which]->numel() == 1) {
          dx[0] += active().dot(dy, other.value.data(), n->value.size());
        } else {
          active().axpy(dx, in[1 - which]->value[0], dy, n->value.size());
        }
      }
      return;
    }
    case OpKind::kConcat: {
      const int rank = static_cast<int>(n->shape.size());
      if (n->axis == 0 || rank == 1) {
        std::size_t off = 0;
        for (auto& x : in) {
          if (double* dx = grad_of(x))
            active().axpy(dx, 1.0, dy + off, x->value.size());
          off += x->value.size();
        }
      } else {
        const int rows = n->shape[0], total = n->shape[1];
        for (int i = 0; i < rows; ++i) {
          int off = 0;
          for (auto& x : in) {
            const int c = x->cols();
            if (double* dx = grad_of(x))
              active().axpy(dx + i * c, 1.0, dy + i * total + off, c);
            off += c;
          }
        }
      }
      return;
    }
    case OpKind::kTanh: {
      if (double* dx = grad_of(in[0]))
        for (std::size_t i = 0; i < n->value.size(); ++i)
          dx[i] += dy[i] * (1.0 - n->value[i] * n->value[i]);
      return;
    }
    case OpKind::kRelu: {
      if (double* dx = grad_of(in[0]))
        active().relu_grad(dx, in[0]->value.data(), dy, n->value.size());
      return;
    }
    case OpKind::kSigmoid: {
      if (double* dx = grad_of(in[0]))
        for (std::size_t i = 0; i < n->value.size(); ++i)
          dx[i] += dy[i] * n->value[i] * (1.0 - n->value[i]);
      return;
    }
    case OpKind::kLogSumExp: {
      double* dx = grad_of(in[0]);
      if (!dx) return;
      const auto it = slices(*in[0], n->axis);
      const int outer = static_cast<int>(n->value.size());
      const int inner =
          static_cast<int>(in[0]->value.size()) / outer;
      for (int j = 0; j < outer; ++j) {
        const double* s = it.slice(j);
        double* ds = dx + (s - in[0]->value.data());
        for (int i = 0; i < inner; ++i)
          ds[i * it.step] +=
              dy[j] * std::exp(s[i * it.step] - n->value[j]);
      }
      return;
    }
    case OpKind::kMaxPool: {
      double* dx = grad_of(in[0]);
      if (!dx) return;
      const auto it = slices(*in[0], n->axis);
      for (std::size_t j = 0; j < n->value.size(); ++j) {
        const double* s = it.slice(static_cast<int>(j));
        dx[(s - in[0]->value.data()) + n->indices[j] * it.step] += dy[j];
      }
      return;
    }
    case OpKind::kScale: {
      if (double* dx = grad_of(in[0]))
        active().axpy(dx, n->alpha, dy, n->value.size());
      return;
    }
    case OpKind::kEmbeddingLookup: {
      double* dt = grad_of(in[0]);
      if (!dt) return;
      const int d = n->shape[1];
      for (std::size_t i = 0; i < n->indices.size(); ++i)
        active().axpy(dt + n->indices[i] * d, 1.0, dy + i * d, d);
      return;
    }
    case OpKind::kDropout: {
      if (double* dx = grad_of(in[0]))
        for (std::size_t i = 0; i < n->value.size(); ++i)
          dx[i] += dy[i] * n->mask[i];
      return;
    }
    case OpKind::kGradReverse: {
      if (double* dx = grad_of(in[0]))
        active().axpy(dx, -n->alpha, dy, n->value.size());
      return;
    }
    case OpKind::kReshape: {
      if (double* dx = grad_of(in[0]))
        active().axpy(dx, 1.0, dy, n->value.size());
      return;
    }
  }
}

}  // namespace
}  // namespace ace::ops

namespace ace {

void backward(const Tensor& root) {
  if (!root.defined()) throw Error("backward: undefined root");
  if (root.numel() != 1)
    throw Error("backward: root must be scalar-shaped, got " +
                shape_str(root.shape()));
  if (!root.requires_grad()) return;  // nothing below needs gradients
  CompGraph g = CompGraph::from_root(root);
  for (Node* n : g.order) {
    if (!n->requires_grad) continue;
    if (n->op == OpKind::kLeaf)
      n->ensure_grad();  // leaves accumulate across passes
    else
      n->grad.assign(n->value.size(), 0.0);
  }
  root.raw()->grad[0] += 1.0;
  for (auto it = g.order.rbegin(); it != g.order.rend(); ++it)
    if ((*it)->requires_grad) ops::backward_node(*it);
}

}  // namespace ace

// -- Finite differences -------------------------------------------------------

namespace ace::ops {

CheckReport finite_difference_check(const std::function<Tensor()>& f,
                                    const std::vector<Tensor>& params,
                                    double eps, double tol, double abs_floor) {
  if (eps <= 0.0) throw Error("finite_difference_check: eps must be positive");
  CheckReport report;

  auto eval = [&]() -> double {
    Tensor out = f();
    if (!out.defined() || out.numel() != 1)
      throw Error("finite_difference_check: f must return a scalar tensor");
    return out.item();
  };

  // One analytic pass.
  std::vector<Tensor> mut = params;
  for (auto& p : mut) p.zero_grad();
  Tensor out = f();
  if (!out.defined() || out.numel() != 1)
    throw Error("finite_difference_check: f must return a scalar tensor");
  if (!std::isfinite(out.item())) {
    report.passed = false;
    report.failures.push_back({"<f>", -1, out.item(), out.item(), 0.0});
    return report;
  }
  backward(out);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(mut.size());
  for (auto& p : mut)
    analytic.emplace_back(p.grad().begin(), p.grad().end());

  for (std::size_t pi = 0; pi < mut.size(); ++pi) {
    auto vals = mut[pi].mutable_value();
    for (std::size_t c = 0; c < vals.size(); ++c) {
      const double orig = vals[c];
      vals[c] = orig + eps;
      const double up = eval();
      vals[c] = orig - eps;
      const double down = eval();
      vals[c] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[pi].empty() ? 0.0 : analytic[pi][c];
      if (!std::isfinite(up) || !std::isfinite(down) ||
          !std::isfinite(numeric)) {
        report.passed = false;
        report.failures.push_back(
            {mut[pi].name(), static_cast<int>(c), a, numeric, 0.0});
        continue;
      }
      const double diff = std::fabs(a - numeric);
      const double denom = std::max(std::fabs(a), std::fabs(numeric));
      const double rel = diff / std::max(denom, abs_floor);
      report.max_rel_error = std::max(report.max_rel_error, rel);
      if (diff > tol * denom && diff > abs_floor) {
        report.passed = false;
        report.failures.push_back(
            {mut[pi].name(), static_cast<int>(c), a, numeric, rel});
      }
    }
  }
  return report;
}

}  // namespace ace::ops
