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

namespace occlubench {

struct MeanStd {
  double mean = 0.0;
  /// Sample (n-1) standard deviation; zero when n == 1.
  double std = 0.0;
  std::size_t n = 0;
};

/// Throws Error on empty input.
MeanStd aggregate_seeds(std::span<const double> values);

}  // namespace occlubench
