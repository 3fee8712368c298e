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

namespace occlubench::simd::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void blend(double alpha, const double* x, const double* y, double* out, std::size_t n) {
  const double beta = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_add(double mu, double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = mu * y[i] + x[i];
}

}  // namespace

const KernelTable& table() {
  static const KernelTable kTable{dot, sum, axpy, blend, scale_add};
  return kTable;
}

}  // namespace occlubench::simd::scalar
