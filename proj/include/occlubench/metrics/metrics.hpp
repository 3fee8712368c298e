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
#include <string_view>
#include <optional>
#include <vector>

#include "occlubench/core/stats.hpp"
#include "occlubench/core/types.hpp"

namespace occlubench::metrics {

/// Fraction of records with predicted == true. Throws on an empty log.
double accuracy(const PredictionLog& log);
/// Accuracy over the records of one split.
double accuracy(const PredictionLog& log, Split split);

/// Clean and occluded accuracies of both splits (fractions or percents,
/// as long as all four share a scale).
struct SplitAccuracy {
  double a_train = 0.0;
  double a_test = 0.0;
  double a_train_i = 0.0;
  double a_test_i = 0.0;
};

inline constexpr double kGapEpsilon = 1e-6;

/// |(a_train_i - a_test_i) / (a_train - a_test)|. A clean generalisation
/// gap below `epsilon` makes the ratio undefined and throws
/// UndefinedMetricError instead of returning a number.
double i_occlusion(const SplitAccuracy& acc, double epsilon = kGapEpsilon);

/// Per predicted class: wrong-as-c on distorted minus wrong-as-c on clean.
struct MisclassDelta {
  std::vector<long> per_class;
  std::string distortion;

  long total() const;
};

/// Both logs must cover the same (split, index) set with the same true
/// labels; throws Error otherwise.
MisclassDelta misclass_delta(const PredictionLog& clean, const PredictionLog& distorted, int num_classes,
                             std::string distortion = {});

enum class MetricKind { kCutOcclusion, kIOcclusion, kMisclassDelta };

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> parse_metric(std::string_view text);

struct RobustnessCurve {
  MetricKind kind = MetricKind::kIOcclusion;
  std::vector<double> fractions;
  std::vector<MeanStd> values;
};

}  // namespace occlubench::metrics
