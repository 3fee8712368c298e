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

#include <span>
#include <string>
#include <vector>

#include "occlubench/metrics/metrics.hpp"

namespace occlubench::metrics {

/// One CSV row: metric, model, fraction, mean, std, n_seeds.
struct CurveRow {
  std::string metric;
  std::string model;
  double fraction = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n_seeds = 0;
};

/// `provenance` lines are emitted first as "# key=value" comments.
std::string curve_csv(const std::vector<CurveRow>& rows, const std::vector<std::string>& provenance);
/// Line plot, one series per model, error bars of +-std.
std::string curve_svg(const std::vector<CurveRow>& rows, const std::string& title, const std::string& y_label);

/// One row per (distortion, class).
std::string delta_csv(std::span<const MisclassDelta> deltas, const std::string& model,
                      const std::vector<std::string>& provenance);
/// Bar chart of the per-class deltas.
std::string delta_svg(const MisclassDelta& delta, const std::string& title);

}  // namespace occlubench::metrics
