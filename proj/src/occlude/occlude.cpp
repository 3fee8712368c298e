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

#include "occlubench/occlude/occlude.hpp"

#include <algorithm>
#include <cmath>

#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/simd/kernels.hpp"

namespace occlubench::occlude {
namespace {

void require_mask_shape(const Image& image, const Mask& mask) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    throw ShapeError("mask " + std::to_string(mask.height()) + "x" + std::to_string(mask.width()) +
                     " does not match image " + std::to_string(image.height()) + "x" +
                     std::to_string(image.width()));
  }
}

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ShapeError("images differ in shape");
}

}  // namespace

Image apply_uniform(const Image& image, const Mask& mask, std::span<const double> fill) {
  require_mask_shape(image, mask);
  if (fill.size() != 1 && fill.size() != static_cast<std::size_t>(image.channels())) {
    throw ShapeError("fill needs 1 or " + std::to_string(image.channels()) + " values");
  }
  Image out = image;
  auto data = out.mutable_data();
  const std::size_t plane = image.plane_size();
  for (int c = 0; c < image.channels(); ++c) {
    const double value = fill.size() == 1 ? fill[0] : fill[static_cast<std::size_t>(c)];
    for (std::size_t p = 0; p < plane; ++p) {
      if (mask.at_index(p)) data[c * plane + p] = value;
    }
  }
  return out;
}

Image apply_donor(const Image& image, const Mask& mask, const Image& donor) {
  require_mask_shape(image, mask);
  require_same_shape(image, donor);
  Image out = image;
  auto data = out.mutable_data();
  const auto src = donor.data();
  const std::size_t plane = image.plane_size();
  for (int c = 0; c < image.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) {
      if (mask.at_index(p)) data[c * plane + p] = src[c * plane + p];
    }
  }
  return out;
}

MixResult mixup_mix(const Image& x1, const Image& x2, double lambda) {
  require_same_shape(x1, x2);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("mixing coefficient must lie in [0, 1]");
  Image out(x1.channels(), x1.height(), x1.width());
  simd::blend(lambda, x1.data(), x2.data(), out.mutable_data());
  return {std::move(out), lambda};
}

MixResult mask_mix(const Image& x1, const Image& x2, const Mask& mask) {
  return {apply_donor(x1, mask, x2), 1.0 - mask.covered_fraction()};
}

Mask CutMixBox::to_mask(int height, int width) const {
  Mask mask(height, width, false);
  for (int y = top; y < bottom; ++y) {
    for (int x = left; x < right; ++x) mask.set(y, x, true);
  }
  return mask;
}

CutMixBox cutmix_box_at(int height, int width, double lambda, int center_y, int center_x) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("mixing coefficient must lie in [0, 1]");
  const double ratio = std::sqrt(1.0 - lambda);
  CutMixBox box;
  box.center_y = center_y;
  box.center_x = center_x;
  box.cut_height = static_cast<int>(std::floor(height * ratio));
  box.cut_width = static_cast<int>(std::floor(width * ratio));
  const int y0 = center_y - box.cut_height / 2;
  const int x0 = center_x - box.cut_width / 2;
  box.top = std::clamp(y0, 0, height);
  box.left = std::clamp(x0, 0, width);
  box.bottom = std::clamp(y0 + box.cut_height, 0, height);
  box.right = std::clamp(x0 + box.cut_width, 0, width);
  return box;
}

CutMixBox cutmix_box(int height, int width, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  const int cy = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(height)));
  const int cx = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(width)));
  return cutmix_box_at(height, width, lambda, cy, cx);
}

MixResult cutmix_mix(const Image& x1, const Image& x2, double lambda, std::uint64_t seed) {
  require_same_shape(x1, x2);
  const auto box = cutmix_box(x1.height(), x1.width(), lambda, seed);
  return mask_mix(x1, x2, box.to_mask(x1.height(), x1.width()));
}

FMixResult fmix_mix(const Image& x1, const Image& x2, const maskgen::FourierMaskParams& params, std::uint64_t seed) {
  require_same_shape(x1, x2);
  const SeedSequence seq(seed);
  FMixResult out;
  out.lambda = maskgen::sample_lambda(params, seq.derive(0));
  out.mask = maskgen::fourier_mask(x1.height(), x1.width(), out.lambda, params, seq.derive(1));
  out.mix = mask_mix(x1, x2, out.mask);
  return out;
}

std::string_view to_string(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::kBasic: return "basic";
    case AugmentationMode::kMixup: return "mixup";
    case AugmentationMode::kCutmix: return "cutmix";
    case AugmentationMode::kFmix: return "fmix";
    case AugmentationMode::kRm: return "rm";
    case AugmentationMode::kRm3: return "rm3";
  }
  return "basic";
}

std::optional<AugmentationMode> parse_augmentation(std::string_view text) {
  for (auto mode : {AugmentationMode::kBasic, AugmentationMode::kMixup, AugmentationMode::kCutmix,
                    AugmentationMode::kFmix, AugmentationMode::kRm, AugmentationMode::kRm3}) {
    if (to_string(mode) == text) return mode;
  }
  return std::nullopt;
}

MixedBatch mix_batch(std::span<const Image* const> images, std::span<const int> labels, const MixOptions& options,
                     std::uint64_t seed, std::span<const Image* const> partners, std::span<const int> partner_labels) {
  if (images.size() != labels.size()) throw ShapeError("batch image/label count mismatch");
  if (!partners.empty() && partners.size() != images.size()) throw ShapeError("partner batch size mismatch");
  if (!partner_labels.empty() && partner_labels.size() != partners.size()) {
    throw ShapeError("partner label count mismatch");
  }
  const std::size_t n = images.size();
  MixedBatch out;
  out.primary_labels.assign(labels.begin(), labels.end());
  out.images.reserve(n);
  if (options.mode == AugmentationMode::kBasic || n == 0) {
    for (const Image* img : images) out.images.push_back(*img);
    out.partner_labels = out.primary_labels;
    out.lambda_eff = 1.0;
    return out;
  }

  const SeedSequence seq(seed);
  std::vector<const Image*> partner(n);
  out.partner_labels.resize(n);
  if (partners.empty()) {
    Rng rng(seq.derive(0));
    const auto perm = rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i) {
      partner[i] = images[perm[i]];
      out.partner_labels[i] = labels[perm[i]];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      partner[i] = partners[i];
      out.partner_labels[i] = partner_labels.empty() ? kNoLabel : partner_labels[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) require_same_shape(*images[i], *partner[i]);

  const int h = images[0]->height();
  const int w = images[0]->width();
  auto lambda_or = [&](std::uint64_t s) {
    return options.fixed_lambda ? *options.fixed_lambda : maskgen::sample_lambda(options.fourier, s);
  };

  switch (options.mode) {
    case AugmentationMode::kMixup: {
      const double lambda = lambda_or(seq.derive(1));
      for (std::size_t i = 0; i < n; ++i) out.images.push_back(mixup_mix(*images[i], *partner[i], lambda).image);
      out.lambda_eff = lambda;
      return out;
    }
    case AugmentationMode::kCutmix: {
      const double lambda = lambda_or(seq.derive(1));
      const auto mask = cutmix_box(h, w, lambda, seq.derive(2)).to_mask(h, w);
      for (std::size_t i = 0; i < n; ++i) out.images.push_back(apply_donor(*images[i], mask, *partner[i]));
      out.lambda_eff = 1.0 - mask.covered_fraction();
      return out;
    }
    case AugmentationMode::kFmix: {
      const double lambda = lambda_or(seq.derive(1));
      const auto mask = maskgen::fourier_mask(h, w, lambda, options.fourier, seq.derive(2));
      for (std::size_t i = 0; i < n; ++i) out.images.push_back(apply_donor(*images[i], mask, *partner[i]));
      out.lambda_eff = 1.0 - mask.covered_fraction();
      return out;
    }
    case AugmentationMode::kRm:
    case AugmentationMode::kRm3: {
      if (options.bank == nullptr) throw Error("fixed-mask augmentation needs a mask bank");
      const Mask& mask = maskgen::bank_pick(*options.bank, seq.derive(1));
      for (std::size_t i = 0; i < n; ++i) out.images.push_back(apply_donor(*images[i], mask, *partner[i]));
      out.lambda_eff = 1.0 - mask.covered_fraction();
      return out;
    }
    case AugmentationMode::kBasic:
      break;
  }
  return out;
}

}  // namespace occlubench::occlude
