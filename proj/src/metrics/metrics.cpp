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

#include "occlubench/metrics/metrics.hpp"

#include <cmath>
#include <string>

#include "occlubench/core/error.hpp"

namespace occlubench::metrics {

double accuracy(const PredictionLog& log) {
  if (log.empty()) throw Error("accuracy of an empty prediction log");
  std::size_t correct = 0;
  for (const auto& r : log) correct += r.correct() ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(log.size());
}

double accuracy(const PredictionLog& log, Split split) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& r : log) {
    if (r.split != split) continue;
    ++total;
    correct += r.correct() ? 1 : 0;
  }
  if (total == 0) throw Error("prediction log has no " + std::string(to_string(split)) + " records");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double i_occlusion(const SplitAccuracy& acc, double epsilon) {
  const double gap = acc.a_train - acc.a_test;
  if (!(std::abs(gap) >= epsilon)) {
    throw UndefinedMetricError("undefined: zero generalisation gap (train " + std::to_string(acc.a_train) +
                               ", test " + std::to_string(acc.a_test) + ")");
  }
  return std::abs((acc.a_train_i - acc.a_test_i) / gap);
}

long MisclassDelta::total() const {
  long sum = 0;
  for (long d : per_class) sum += d;
  return sum;
}

MisclassDelta misclass_delta(const PredictionLog& clean, const PredictionLog& distorted, int num_classes,
                             std::string distortion) {
  if (num_classes <= 0) throw Error("misclass_delta needs a positive class count");
  PredictionLog a = clean;
  PredictionLog b = distorted;
  sort_log(a);
  sort_log(b);
  if (a.size() != b.size()) throw Error("clean and distorted logs cover different record sets");
  MisclassDelta out;
  out.distortion = std::move(distortion);
  out.per_class.assign(static_cast<std::size_t>(num_classes), 0);
  auto check = [num_classes](const PredictionRecord& r) {
    if (r.predicted_label < 0 || r.predicted_label >= num_classes || r.true_label < 0 || r.true_label >= num_classes) {
      throw Error("record label outside [0, " + std::to_string(num_classes) + ")");
    }
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].split != b[i].split || a[i].index != b[i].index || a[i].true_label != b[i].true_label) {
      throw Error("clean and distorted logs cover different record sets (first mismatch at position " +
                  std::to_string(i) + ")");
    }
    check(a[i]);
    check(b[i]);
    if (!b[i].correct()) ++out.per_class[static_cast<std::size_t>(b[i].predicted_label)];
    if (!a[i].correct()) --out.per_class[static_cast<std::size_t>(a[i].predicted_label)];
  }
  return out;
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kCutOcclusion: return "cutocclusion";
    case MetricKind::kIOcclusion: return "iocclusion";
    case MetricKind::kMisclassDelta: return "misclass-delta";
  }
  return "iocclusion";
}

std::optional<MetricKind> parse_metric(std::string_view text) {
  for (auto k : {MetricKind::kCutOcclusion, MetricKind::kIOcclusion, MetricKind::kMisclassDelta}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

}  // namespace occlubench::metrics
