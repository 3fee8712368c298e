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
#include <optional>
#include <vector>

#include "occlubench/core/types.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "occlubench/occlude/occlude.hpp"
#include "occlubench/refmodel/tiny_cnn.hpp"

namespace occlubench::refmodel {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 128;
  /// Piecewise-constant schedule: `learning_rate` before `lr_drop_epoch`,
  /// `learning_rate_after` from then on. A negative drop epoch means epochs / 2.
  double learning_rate = 0.1;
  double learning_rate_after = 0.001;
  int lr_drop_epoch = -1;
  double momentum = 0.9;
  double weight_decay = 0.0;
  occlude::AugmentationMode mode = occlude::AugmentationMode::kBasic;
  maskgen::FourierMaskParams fourier;
  std::optional<double> fixed_lambda;
  /// Shuffles the training labels once before the first epoch.
  bool label_randomization = false;
  /// Evaluate unaugmented train accuracy after every epoch.
  bool track_train_accuracy = false;
  std::uint64_t seed = 0;

  /// Every violated constraint, empty when valid.
  std::vector<std::string> problems() const;
  double learning_rate_at(int epoch) const;
};

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0.0;
  double mean_loss = 0.0;
  /// Share of mixed samples whose argmax is the dominant label.
  double batch_accuracy = 0.0;
  /// Unaugmented train accuracy against the training labels, if tracked.
  std::optional<double> train_accuracy;
};

struct TrainResult {
  TinyCnn model;
  std::vector<EpochStats> log;
  /// Labels actually trained on (permuted under label randomization).
  std::vector<int> train_labels;
};

/// SGD with momentum (v = mu * v + g; w -= lr * v) on batch-mean mixed
/// cross-entropy. Batches are formed from a per-epoch permutation drawn
/// from derive(seed), independent of the augmentation mode, so runs that
/// differ only in a no-op augmentation produce identical updates.
///
/// `donors`, when given, supplies partner images from another dataset in
/// place of the in-batch permutation; their labels are not trained on.
/// Throws DivergenceError on a non-finite loss.
TrainResult train(TinyCnn model, const LabeledDataset& data, const TrainConfig& config,
                  const maskgen::MaskBank* bank = nullptr, const LabeledDataset* donors = nullptr);

/// The label vector train() uses for `data` under `config`.
std::vector<int> training_labels(const LabeledDataset& data, const TrainConfig& config);

/// One record per image, prediction = argmax with ties to the lowest class.
/// Record indices are the dataset ids. Parallel over images.
PredictionLog predict_dataset(const TinyCnn& model, const LabeledDataset& data);

}  // namespace occlubench::refmodel
