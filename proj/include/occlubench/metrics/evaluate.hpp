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
#include <span>
#include <string_view>
#include <vector>

#include "occlubench/core/stats.hpp"
#include "occlubench/core/types.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "occlubench/metrics/metrics.hpp"
#include "occlubench/refmodel/grad_cam.hpp"
#include "occlubench/refmodel/tiny_cnn.hpp"

namespace occlubench::metrics {

enum class MaskPolicy { kSaliency, kRect, kFourier };
enum class FillMode { kUniform, kDonor };

std::string_view to_string(MaskPolicy policy);
std::optional<MaskPolicy> parse_mask_policy(std::string_view text);
std::string_view to_string(FillMode fill);
std::optional<FillMode> parse_fill_mode(std::string_view text);

/// How each image is occluded. Image at position p of a dataset gets its
/// mask (and donor) from derive(seed, p).
struct OcclusionSpec {
  MaskPolicy policy = MaskPolicy::kRect;
  FillMode fill = FillMode::kUniform;
  /// One value or one per channel, in normalized space (0 = dataset mean).
  std::vector<double> fill_value{0.0};
  /// Required for FillMode::kDonor; must match the image shape.
  const LabeledDataset* donors = nullptr;
  maskgen::FourierMaskParams fourier;

  /// True when the occluded images do not depend on the seed.
  bool seed_free() const { return policy == MaskPolicy::kSaliency && fill == FillMode::kUniform; }
};

Mask occlusion_mask(const OcclusionSpec& spec, int height, int width, double fraction, std::uint64_t item_seed,
                    const SaliencyMap* saliency);

Image occlude_image(const Image& image, const OcclusionSpec& spec, double fraction, std::uint64_t item_seed,
                    const SaliencyMap* saliency);

/// Occluded copy of the dataset. `saliency` is required (one map per image)
/// for the saliency policy.
LabeledDataset occlude_dataset(const LabeledDataset& data, const OcclusionSpec& spec, double fraction,
                               std::uint64_t seed, std::span<const SaliencyMap> saliency = {});

/// Predictions on the occluded dataset, parallel over images.
PredictionLog predict_occluded(const refmodel::TinyCnn& model, const LabeledDataset& data, const OcclusionSpec& spec,
                               double fraction, std::uint64_t seed, std::span<const SaliencyMap> saliency = {});

/// Seed of evaluation repeat `repeat` under `base_seed`.
std::uint64_t repeat_seed(std::uint64_t base_seed, std::size_t repeat);

/// Test accuracy under rectangle occlusion (the policy in `spec` is forced
/// to rect), as a fraction, aggregated over `repeats` seeds.
MeanStd cut_occlusion(const refmodel::TinyCnn& model, const LabeledDataset& test, double fraction,
                      OcclusionSpec spec, std::size_t repeats, std::uint64_t base_seed,
                      std::vector<double>* per_seed = nullptr);

/// Aggregates accuracies of already-occluded prediction logs, one per seed.
MeanStd cut_occlusion_from_logs(std::span<const PredictionLog> per_seed);

struct IOcclusionSample {
  double fraction = 0.0;
  std::size_t repeat = 0;
  SplitAccuracy accuracy;
  double value = 0.0;
};

struct IOcclusionInputs {
  const refmodel::TinyCnn* model = nullptr;
  const LabeledDataset* train = nullptr;
  const LabeledDataset* test = nullptr;
  OcclusionSpec spec;
  refmodel::GradCamConfig cam;
  /// Precomputed saliency (saliency policy); computed with Grad-CAM when empty.
  std::span<const SaliencyMap> train_saliency;
  std::span<const SaliencyMap> test_saliency;
};

/// For each fraction and repeat: occlude train and test, measure both
/// accuracies, apply i_occlusion. Saliency is computed once per image and
/// re-thresholded per fraction. Throws UndefinedMetricError on a zero
/// clean generalisation gap.
RobustnessCurve i_occlusion_curve(const IOcclusionInputs& inputs, std::span<const double> fractions,
                                  std::size_t repeats, std::uint64_t base_seed,
                                  std::vector<IOcclusionSample>* samples = nullptr);

/// i_occlusion from logs holding both splits: clean and occluded.
double i_occlusion_from_logs(const PredictionLog& clean, const PredictionLog& occluded,
                             SplitAccuracy* accuracy = nullptr);

}  // namespace occlubench::metrics
