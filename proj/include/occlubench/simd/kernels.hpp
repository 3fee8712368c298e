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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace occlubench::simd {

// Data-parallel inner loops of the CNN and the mixing ops. Each has a
// scalar reference and an AVX2 variant chosen once at startup.
//
// axpy/blend/scale are element-wise and bit-identical across variants
// (no fused multiply-add). dot and sum reorder the reduction, so the
// variants agree only to rounding.

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out = alpha * x + (1 - alpha) * y
  void (*blend)(double alpha, const double* x, const double* y, double* out, std::size_t n);
  /// y = mu * y + x
  void (*scale_add)(double mu, double* y, const double* x, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
namespace avx2 {
/// Null when the AVX2 variant was not compiled in.
const KernelTable* table();
}

bool cpu_supports(Isa isa);

/// Table selected at startup: AVX2 when compiled in and supported by the
/// CPU, unless OCCLUBENCH_SIMD=scalar.
const KernelTable& active();
Isa active_isa();
/// Overrides the selection (tests and benchmarking). Throws if unsupported.
void force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a.data(), b.data(), a.size()); }
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void blend(double alpha, std::span<const double> x, std::span<const double> y, std::span<double> out) {
  active().blend(alpha, x.data(), y.data(), out.data(), x.size());
}
inline void scale_add(double mu, std::span<double> y, std::span<const double> x) {
  active().scale_add(mu, y.data(), x.data(), y.size());
}

}  // namespace occlubench::simd
