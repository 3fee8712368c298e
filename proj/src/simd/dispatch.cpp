// Copyright 2026 The occlubench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "occlubench/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "occlubench/core/error.hpp"

namespace occlubench::simd {
namespace {

const KernelTable* table_for(Isa isa) {
  return isa == Isa::kAvx2 ? avx2::table() : &scalar::table();
}

Isa detect() {
  if (const char* env = std::getenv("OCCLUBENCH_SIMD")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return cpu_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) {
  if (isa == Isa::kScalar) return true;
  if (avx2::table() == nullptr) return false;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() { return *table_for(selected().load(std::memory_order_relaxed)); }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!cpu_supports(isa)) throw Error("instruction set " + std::string(to_string(isa)) + " not available");
  selected().store(isa, std::memory_order_relaxed);
}

}  // namespace occlubench::simd
