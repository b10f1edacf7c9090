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

#ifndef ACE_KERNELS_HPP_
#define ACE_KERNELS_HPP_

#include <cstddef>

// Double-precision inner-loop kernels behind the tensor ops. Two builds of
// every kernel exist: a scalar reference and, on x86-64, an AVX2 variant.
// The backend is picked once at runtime (cpuid, overridable via the
// ACE_KERNELS env var or set_backend) and the equivalence of the two builds
// is enforced by tests/test_kernels.cpp.
//
// Semantics are chosen so the elementwise kernels and the axpy-style matmuls
// are bit-identical across backends (same per-element operation order, no
// FMA); only the dot-product reductions may differ in the last ulps.

namespace ace::kernels {

struct Ops {
  const char* name;

  // out = a + b, out = a * b, out = s * x  (elementwise, length n)
  void (*add)(double* out, const double* a, const double* b, std::size_t n);
  void (*mul)(double* out, const double* a, const double* b, std::size_t n);
  void (*scale)(double* out, const double* x, double s, std::size_t n);

  // y += a * x
  void (*axpy)(double* y, double a, const double* x, std::size_t n);

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max)(const double* x, std::size_t n);  // n >= 1

  void (*relu)(double* out, const double* x, std::size_t n);
  // dx += dy where x > 0
  void (*relu_grad)(double* dx, const double* x, const double* dy,
                    std::size_t n);

  // Row-major matmul family, all accumulating into C. (m, k, n) always refers
  // to the shapes of the original product A[m x k] * B[k x n].
  //   matmul_nn: C[m x n] += A * B
  //   matmul_tn: C[k x n] += A^T * dC   (A is m x k, dC is m x n)
  //   matmul_nt: C[m x k] += dC * B^T   (dC is m x n, B is k x n)
  void (*matmul_nn)(double* c, const double* a, const double* b, std::size_t m,
                    std::size_t k, std::size_t n);
  void (*matmul_tn)(double* c, const double* a, const double* dc,
                    std::size_t m, std::size_t k, std::size_t n);
  void (*matmul_nt)(double* c, const double* dc, const double* b,
                    std::size_t m, std::size_t k, std::size_t n);

  // Fused Adamax step:
  //   m = beta1 * m + (1 - beta1) * g
  //   u = max(beta2 * u, |g|)
  //   theta -= lr_bias * (m / (u + eps))
  // where lr_bias already contains the 1/(1 - beta1^t) correction.
  void (*adamax)(double* theta, double* m, double* u, const double* g,
                 std::size_t n, double beta1, double beta2, double lr_bias,
                 double eps);
};

enum class Backend { kAuto, kScalar, kAvx2 };

const Ops& scalar_ops();
const Ops& avx2_ops();   // valid only if avx2_compiled()
bool avx2_compiled();    // AVX2 kernels present in this binary
bool avx2_supported();   // and the CPU can run them

// Active kernel set. Resolution order: set_backend() > ACE_KERNELS env var
// ("scalar"/"avx2") > cpuid autodetect.
const Ops& active();
void set_backend(Backend b);

}  // namespace ace::kernels

#endif  // ACE_KERNELS_HPP_
