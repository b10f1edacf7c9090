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

// Scalar reference kernels. These define the semantics the AVX2 variants are
// tested against; keep every per-element expression in the exact form used by
// src/kernels_avx2.cpp.

#include <cmath>
#include <cstddef>

#include "ace/kernels.hpp"

namespace ace::kernels {
namespace {

void add_scalar(double* out, const double* a, const double* b,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_scalar(double* out, const double* a, const double* b,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(double* out, const double* x, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

void relu_scalar(double* out, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_grad_scalar(double* dx, const double* x, const double* dy,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

void matmul_nn_scalar(double* c, const double* a, const double* b,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      axpy_scalar(c + i * n, a[i * k + l], b + l * n, n);
}

void matmul_tn_scalar(double* c, const double* a, const double* dc,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      axpy_scalar(c + l * n, a[i * k + l], dc + i * n, n);
}

void matmul_nt_scalar(double* c, const double* dc, const double* b,
                      std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      c[i * k + l] += dot_scalar(dc + i * n, b + l * n, n);
}

void adamax_scalar(double* theta, double* m, double* u, const double* g,
                   std::size_t n, double beta1, double beta2, double lr_bias,
                   double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    const double ag = std::fabs(g[i]);
    const double bu = beta2 * u[i];
    u[i] = bu > ag ? bu : ag;
    theta[i] = theta[i] - lr_bias * (m[i] / (u[i] + eps));
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",         add_scalar,       mul_scalar,       scale_scalar,
      axpy_scalar,      dot_scalar,       max_scalar,       relu_scalar,
      relu_grad_scalar, matmul_nn_scalar, matmul_tn_scalar, matmul_nt_scalar,
      adamax_scalar,
  };
  return ops;
}

}  // namespace ace::kernels
