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

#ifndef ACE_AUTODIFF_HPP_
#define ACE_AUTODIFF_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ace/rng.hpp"
#include "ace/tensor.hpp"

namespace ace::ops {

// The op catalog. All ops validate shapes and throw ace::Error naming the
// offending shapes on mismatch. Broadcasting is deliberately narrow: add()
// supports a row-vector bias against a matrix, mul() supports one
// scalar-shaped operand; everything else must match exactly.

// (m x k)(k x n) -> (m x n). Rank-1 operands are treated as a row vector on
// the left / column vector on the right, and the unit axis is dropped from
// the result: (k)(k x n) -> (n), (m x k)(k) -> (m), (k)(k) -> (1).
Tensor matmul(const Tensor& a, const Tensor& b);

// Same shape, or matrix + row bias: (m x n) + (n) applies the bias to every
// row (in either argument order).
Tensor add(const Tensor& a, const Tensor& b);

// Elementwise product; one operand may be scalar-shaped (numel 1).
Tensor mul(const Tensor& a, const Tensor& b);

// Concatenate along `axis`. Rank-1 inputs: axis 0 only. Rank-2 inputs agree
// on the other axis.
Tensor concat(const std::vector<Tensor>& xs, int axis);

Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Log-sum-exp reduction, max-subtracted for overflow safety. Rank-1 input
// reduces to shape {1}; rank-2 input reduces `axis`, keeping rank:
// axis 0: (m x n) -> (1 x n), axis 1: (m x n) -> (m x 1).
Tensor log_sum_exp(const Tensor& x, int axis = 0);

// Elementwise max reduction over `axis`, same shape conventions as
// log_sum_exp. Gradient routes to the first attaining index.
Tensor max_pool(const Tensor& x, int axis = 0);

Tensor scale(const Tensor& x, double s);

// Gather rows of a rank-2 tensor; backward scatter-adds into the table.
Tensor embedding_lookup(const Tensor& table, std::span<const int> ids);

// Inverted dropout from an explicit stream: keep with probability 1-rate and
// scale kept values by 1/(1-rate). Identity (no node) when !training.
Tensor dropout(const Tensor& x, double rate, RngStream& rng, bool training);

// Identity forward; backward multiplies the upstream gradient by -lambda.
Tensor grad_reverse(const Tensor& x, double lambda);

// Metadata-only view with identical storage; numel must be preserved.
Tensor reshape(const Tensor& x, Shape shape);

// Generic entry point for the catalog; rejects unknown kinds.
struct OpAttrs {
  int axis = 0;
  double alpha = 0.0;
  std::span<const int> indices = {};
  RngStream* rng = nullptr;
  bool training = true;
  Shape shape = {};
};
Tensor apply(OpKind kind, const std::vector<Tensor>& inputs,
             const OpAttrs& attrs = {});

// -- Verification ------------------------------------------------------------

struct CheckFailure {
  std::string param;
  int coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct CheckReport {
  bool passed = true;
  double max_rel_error = 0.0;
  std::vector<CheckFailure> failures;
};

// Central-difference check of d(f)/d(params). `f` must rebuild its graph (and
// reseed any stochastic stream) on every call and return a scalar tensor. A
// coordinate fails when |analytic - numeric| exceeds both tol * max(|a|, |n|)
// and abs_floor; non-finite values of f are recorded as failures rather than
// thrown.
CheckReport finite_difference_check(const std::function<Tensor()>& f,
                                    const std::vector<Tensor>& params,
                                    double eps = 1e-5, double tol = 1e-4,
                                    double abs_floor = 1e-7);

}  // namespace ace::ops

#endif  // ACE_AUTODIFF_HPP_
