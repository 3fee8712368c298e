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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "occlubench/core/error.hpp"
#include "occlubench/core/types.hpp"
#include "occlubench/dataio/datasets.hpp"
#include "occlubench/metrics/evaluate.hpp"
#include "occlubench/refmodel/grad_cam.hpp"
#include "occlubench/refmodel/train.hpp"

namespace occlubench::dataio {

/// Raised with every problem found in a run config, one per line.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class SourceKind { kSynthetic, kCifar10, kIdx };

/// Where the images of one dataset come from.
struct DataSource {
  SourceKind kind = SourceKind::kSynthetic;
  int num_classes = 10;
  // cifar10
  std::vector<std::filesystem::path> train_files;
  std::vector<std::filesystem::path> test_files;
  // idx
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  // synthetic: train from derive(seed, 0), test from derive(seed, 1)
  SyntheticSpec synthetic;
  int test_per_class = 100;
};

struct EvalConfig {
  metrics::MetricKind metric = metrics::MetricKind::kIOcclusion;
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t seeds = 5;
  metrics::MaskPolicy policy = metrics::MaskPolicy::kSaliency;
  metrics::FillMode fill = metrics::FillMode::kUniform;
  std::vector<double> fill_value{0.0};
  refmodel::GradCamConfig gradcam;
  std::optional<std::filesystem::path> subset;
};

struct RunConfig {
  DataSource data;
  /// Supplies donor images for textured occlusion and cross-dataset mixing.
  std::optional<DataSource> donors;
  /// Fitted on the train split (of the [0, 1] pixels) when absent.
  std::optional<Normalization> normalization;
  std::vector<int> conv_channels{8, 16};
  int kernel = 3;
  refmodel::TrainConfig train;
  /// Draw mixing partners from the donor source instead of the batch.
  bool donor_partners = false;
  std::optional<std::filesystem::path> mask_bank;
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";

  /// Every violated constraint; empty when the config is usable.
  std::vector<std::string> problems() const;
};

/// Parses JSON text; relative paths resolve against `base`. Unknown keys and type errors are collected rather
/// than reported one at a time; throws ConfigError listing all of them.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base = {});
RunConfig read_run_config(const std::filesystem::path& path);
/// Canonical JSON form (round-trips through parse_run_config).
std::string encode_run_config(const RunConfig& config);

struct LoadedData {
  LabeledDataset train;
  LabeledDataset test;
  std::optional<LabeledDataset> donors;
  Normalization normalization;
};

/// Loads both splits (and donors), fits or applies the normalization and
/// normalizes everything in place.
LoadedData load_data(const RunConfig& config);

/// "key=value" lines describing the preprocessing, for output provenance.
std::vector<std::string> provenance(const RunConfig& config, const Normalization& norm);

}  // namespace occlubench::dataio
