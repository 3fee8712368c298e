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
#include <cstdint>
#include <span>
#include <vector>

#include "occlubench/core/types.hpp"

namespace occlubench::maskgen {

/// Parameters of low-pass Fourier masks. Defaults follow FMix.
struct FourierMaskParams {
  double decay_power = 3.0;
  /// lambda ~ Beta(alpha, alpha)
  double alpha = 1.0;

  void validate() const;
};

/// round(fraction * h * w). Throws Error unless 0 <= fraction <= 1.
std::size_t target_count(int height, int width, double fraction);

/// Marks the k largest values; equal values are taken in ascending
/// row-major order. `values` has height*width entries.
Mask top_k_mask(int height, int width, std::span<const double> values, std::size_t k);

// ---- rectangles ----------------------------------------------------------

struct RectShape {
  int height = 0;
  int width = 0;
  friend bool operator==(const RectShape&, const RectShape&) = default;
};

/// Rectangles fitting a height x width grid whose area is closest to
/// `target`; among those, the ones with the smallest |rh - rw|. Both
/// orientations of a non-square shape are returned.
std::vector<RectShape> closest_rect_shapes(int height, int width, std::size_t target);

Mask rect_mask_at(int height, int width, int top, int left, RectShape shape);

/// One axis-aligned rectangle fully inside the grid. Its area is the
/// realizable area closest to round(fraction*h*w); the shape (among ties)
/// and the placement are uniform given `seed`. The achieved fraction is
/// the mask's covered_fraction().
Mask rect_mask(int height, int width, double fraction, std::uint64_t seed);

// ---- Fourier masks -------------------------------------------------------

/// Grayscale field: complex Gaussian noise on the full frequency grid,
/// bin (fy, fx) scaled by 1 / max(f_min, |f|)^decay with
/// f_min = 1 / max(h, w), then the real part of the inverse 2-D DFT.
std::vector<double> fourier_field(int height, int width, const FourierMaskParams& params, std::uint64_t seed);

/// Covers exactly round(lambda*h*w) pixels with the largest field values.
Mask fourier_mask(int height, int width, double lambda, const FourierMaskParams& params, std::uint64_t seed);

/// lambda ~ Beta(alpha, alpha).
double sample_lambda(const FourierMaskParams& params, std::uint64_t seed);

// ---- saliency ------------------------------------------------------------

/// Covers exactly round(fraction*h*w) of the most salient pixels, ties in
/// ascending row-major order. Throws on an empty map or negative/non-finite values.
Mask saliency_mask(const SaliencyMap& map, double fraction);

// ---- fixed banks ---------------------------------------------------------

/// Masks fixed for a whole training run (one for RM, three for RM3).
class MaskBank {
 public:
  /// Throws if empty or the masks differ in shape.
  explicit MaskBank(std::vector<Mask> masks);

  /// Each entry is a Fourier mask with its own sampled lambda.
  static MaskBank sample_fourier(std::size_t count, int height, int width, const FourierMaskParams& params,
                                 std::uint64_t seed);

  std::size_t size() const { return masks_.size(); }
  const std::vector<Mask>& masks() const { return masks_; }
  int height() const { return masks_.front().height(); }
  int width() const { return masks_.front().width(); }

 private:
  std::vector<Mask> masks_;
};

/// Uniform choice over the bank, deterministic in `seed`.
const Mask& bank_pick(const MaskBank& bank, std::uint64_t seed);

}  // namespace occlubench::maskgen
