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
#include <utility>
#include <vector>

#include "occlubench/core/types.hpp"
#include "occlubench/maskgen/maskgen.hpp"

namespace occlubench::occlude {

/// Covered pixels take `fill` in every channel. `fill` holds one value
/// (broadcast) or one value per channel. Throws ShapeError on mismatch.
Image apply_uniform(const Image& image, const Mask& mask, std::span<const double> fill);

/// M * donor + (1 - M) * image.
Image apply_donor(const Image& image, const Mask& mask, const Image& donor);

/// A mixed sample with its effective coefficient: the share of the first
/// image that survived. Label weights are (lambda_eff, 1 - lambda_eff).
struct MixResult {
  Image image;
  double lambda_eff = 1.0;

  std::pair<double, double> label_weights() const { return {lambda_eff, 1.0 - lambda_eff}; }
};

/// lambda * x1 + (1 - lambda) * x2. lambda must lie in [0, 1].
MixResult mixup_mix(const Image& x1, const Image& x2, double lambda);

/// Pastes x2 over x1 wherever the mask is set; lambda_eff = 1 - covered fraction.
MixResult mask_mix(const Image& x1, const Image& x2, const Mask& mask);

/// CutMix box. The nominal box is floor(H*sqrt(1-lambda)) x floor(W*sqrt(1-lambda))
/// centred on (center_y, center_x); it may overhang the border, and the
/// half-open clipped extent is what gets pasted.
struct CutMixBox {
  int center_y = 0;
  int center_x = 0;
  int cut_height = 0;
  int cut_width = 0;
  int top = 0;
  int left = 0;
  int bottom = 0;
  int right = 0;

  int clipped_area() const { return (bottom - top) * (right - left); }
  Mask to_mask(int height, int width) const;
};

CutMixBox cutmix_box_at(int height, int width, double lambda, int center_y, int center_x);
/// Center uniform over the pixel grid.
CutMixBox cutmix_box(int height, int width, double lambda, std::uint64_t seed);

MixResult cutmix_mix(const Image& x1, const Image& x2, double lambda, std::uint64_t seed);

struct FMixResult {
  MixResult mix;
  double lambda = 0.0;
  Mask mask;
};

/// lambda from sample_lambda(derive(seed, 0)); mask from
/// fourier_mask(lambda, derive(seed, 1)); x2 pasted where the mask is set.
FMixResult fmix_mix(const Image& x1, const Image& x2, const maskgen::FourierMaskParams& params, std::uint64_t seed);

// ---- batch mixing for training -------------------------------------------

enum class AugmentationMode { kBasic, kMixup, kCutmix, kFmix, kRm, kRm3 };

std::string_view to_string(AugmentationMode mode);
/// "basic", "mixup", "cutmix", "fmix", "rm", "rm3"
std::optional<AugmentationMode> parse_augmentation(std::string_view text);

struct MixOptions {
  AugmentationMode mode = AugmentationMode::kBasic;
  maskgen::FourierMaskParams fourier;
  /// Replaces the sampled lambda of MixUp/CutMix/FMix.
  std::optional<double> fixed_lambda;
  /// Required for kRm / kRm3.
  const maskgen::MaskBank* bank = nullptr;
};

/// No partner label: the partner comes from another label space and only
/// the primary label is trained on.
inline constexpr int kNoLabel = -1;

struct MixedBatch {
  std::vector<Image> images;
  std::vector<int> primary_labels;
  std::vector<int> partner_labels;
  /// One lambda, one mask and one permutation are drawn per batch.
  double lambda_eff = 1.0;
};

/// Mixes each sample with a partner. Without explicit partners the partner
/// of sample i is sample perm[i] of the same batch (standard MSDA); with
/// explicit partners (e.g. a batch drawn from another dataset) partner i
/// is used as is. Basic mode copies the batch with lambda_eff = 1.
MixedBatch mix_batch(std::span<const Image* const> images, std::span<const int> labels, const MixOptions& options,
                     std::uint64_t seed, std::span<const Image* const> partners = {},
                     std::span<const int> partner_labels = {});

}  // namespace occlubench::occlude
