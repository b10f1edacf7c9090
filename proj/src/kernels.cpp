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

#include "ace/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace ace::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops& resolve_auto() {
  if (const char* env = std::getenv("ACE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return avx2_ops();
  }
  return avx2_supported() ? avx2_ops() : scalar_ops();
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  if (!avx2_compiled()) return false;
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = &resolve_auto();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void set_backend(Backend b) {
  switch (b) {
    case Backend::kScalar:
      g_active.store(&scalar_ops(), std::memory_order_release);
      break;
    case Backend::kAvx2:
      g_active.store(avx2_supported() ? &avx2_ops() : &scalar_ops(),
                     std::memory_order_release);
      break;
    case Backend::kAuto:
      g_active.store(&resolve_auto(), std::memory_order_release);
      break;
  }
}

}  // namespace ace::kernels
