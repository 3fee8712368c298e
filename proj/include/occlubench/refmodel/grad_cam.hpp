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

#include <optional>
#include <span>
#include <string_view>

#include "occlubench/core/types.hpp"
#include "occlubench/refmodel/tiny_cnn.hpp"

namespace occlubench::refmodel {

enum class CamTarget { kPredicted, kTrue };
enum class Upsampling { kNearest, kBilinear };

struct GradCamConfig {
  /// Conv layer index; negative counts from the end (-1 = final conv layer).
  int layer = -1;
  CamTarget target = CamTarget::kPredicted;
  Upsampling upsampling = Upsampling::kBilinear;
};

std::optional<CamTarget> parse_cam_target(std::string_view text);
std::optional<Upsampling> parse_upsampling(std::string_view text);

/// ReLU(sum_k alpha_k A^k) resized to out_height x out_width, where alpha_k
/// is the spatial mean of gradients[k]. activations/gradients are
/// maps x height x width.
SaliencyMap combine_cam(std::span<const double> activations, std::span<const double> gradients, int maps, int height,
                        int width, int out_height, int out_width, Upsampling upsampling);

/// Resizes a single-channel map (align_corners = false convention for bilinear).
std::vector<double> resize_map(std::span<const double> values, int height, int width, int out_height, int out_width,
                               Upsampling upsampling);

/// Grad-CAM of the target class at the configured conv layer, at input
/// resolution. `true_label` is required when the target is kTrue.
SaliencyMap grad_cam(const TinyCnn& model, const Image& image, const GradCamConfig& config,
                     std::optional<int> true_label = std::nullopt);

/// Grad-CAM for every image of a dataset, parallel over images.
std::vector<SaliencyMap> grad_cam_dataset(const TinyCnn& model, const LabeledDataset& data,
                                          const GradCamConfig& config);

}  // namespace occlubench::refmodel
