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

#include "occlubench/maskgen/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"

namespace occlubench::maskgen {

void FourierMaskParams::validate() const {
  if (!(decay_power > 0.0) || !std::isfinite(decay_power)) throw Error("Fourier decay power must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("Beta alpha must be positive");
}

std::size_t target_count(int height, int width, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("fraction must lie in [0, 1]");
  if (height < 0 || width < 0) throw ShapeError("negative mask dimensions");
  const double total = static_cast<double>(height) * width;
  return static_cast<std::size_t>(std::llround(fraction * total));
}

Mask top_k_mask(int height, int width, std::span<const double> values, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (values.size() != n) throw ShapeError("value map does not match mask shape");
  if (k > n) throw Error("cannot cover more pixels than the grid holds");
  Mask mask(height, width, false);
  if (k == 0) return mask;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto before = [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  };
  if (k < n) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
  for (std::size_t i = 0; i < k; ++i) mask.set_index(order[i], true);
  return mask;
}

std::vector<RectShape> closest_rect_shapes(int height, int width, std::size_t target) {
  if (target == 0 || height == 0 || width == 0) return {RectShape{0, 0}};
  std::vector<RectShape> best;
  long best_gap = -1;
  int best_skew = 0;
  const long t = static_cast<long>(target);
  for (int rh = 1; rh <= height; ++rh) {
    // Only the widths bracketing t/rh (clamped to the grid) can be closest for this height.
    const long lo = std::clamp(t / rh, 1L, static_cast<long>(width));
    const long hi = std::clamp((t + rh - 1) / rh, 1L, static_cast<long>(width));
    for (long rw_long : {lo, hi}) {
      const int rw = static_cast<int>(rw_long);
      const long gap = std::labs(static_cast<long>(rh) * rw - t);
      const int skew = std::abs(rh - rw);
      if (best_gap < 0 || gap < best_gap || (gap == best_gap && skew < best_skew)) {
        best_gap = gap;
        best_skew = skew;
        best.assign(1, RectShape{rh, rw});
      } else if (gap == best_gap && skew == best_skew &&
                 std::find(best.begin(), best.end(), RectShape{rh, rw}) == best.end()) {
        best.push_back(RectShape{rh, rw});
      }
    }
  }
  return best;
}

Mask rect_mask_at(int height, int width, int top, int left, RectShape shape) {
  if (top < 0 || left < 0 || top + shape.height > height || left + shape.width > width) {
    throw ShapeError("rectangle does not fit inside the grid");
  }
  Mask mask(height, width, false);
  for (int y = top; y < top + shape.height; ++y) {
    for (int x = left; x < left + shape.width; ++x) mask.set(y, x, true);
  }
  return mask;
}

Mask rect_mask(int height, int width, double fraction, std::uint64_t seed) {
  const std::size_t target = target_count(height, width, fraction);
  if (target == 0) return Mask(height, width, false);
  const auto shapes = closest_rect_shapes(height, width, target);
  Rng rng(seed);
  const RectShape shape = shapes[rng.uniform_int(shapes.size())];
  const int top = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(height - shape.height + 1)));
  const int left = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(width - shape.width + 1)));
  return rect_mask_at(height, width, top, left, shape);
}

namespace {

double fft_frequency(int k, int n) {
  // numpy.fft.fftfreq ordering: 0, 1, ..., ceil(n/2)-1, -floor(n/2), ..., -1
  return (k <= (n - 1) / 2 ? k : k - n) / static_cast<double>(n);
}

struct Twiddles {
  std::vector<double> cos_table;
  std::vector<double> sin_table;
  explicit Twiddles(int n) : cos_table(static_cast<std::size_t>(n)), sin_table(static_cast<std::size_t>(n)) {
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * M_PI * k / n;
      cos_table[static_cast<std::size_t>(k)] = std::cos(angle);
      sin_table[static_cast<std::size_t>(k)] = std::sin(angle);
    }
  }
};

}  // namespace

std::vector<double> fourier_field(int height, int width, const FourierMaskParams& params, std::uint64_t seed) {
  params.validate();
  if (height <= 0 || width <= 0) throw ShapeError("Fourier mask dimensions must be positive");
  const auto h = static_cast<std::size_t>(height);
  const auto w = static_cast<std::size_t>(width);
  const double f_min = 1.0 / std::max(height, width);

  std::vector<double> re(h * w);
  std::vector<double> im(h * w);
  Rng rng(seed);
  for (std::size_t u = 0; u < h; ++u) {
    const double fy = fft_frequency(static_cast<int>(u), height);
    for (std::size_t v = 0; v < w; ++v) {
      const double fx = fft_frequency(static_cast<int>(v), width);
      const double scale = 1.0 / std::pow(std::max(f_min, std::sqrt(fy * fy + fx * fx)), params.decay_power);
      const double a = rng.normal();
      const double b = rng.normal();
      re[u * w + v] = a * scale;
      im[u * w + v] = b * scale;
    }
  }

  // Separable inverse DFT: rows (v -> x) then columns (u -> y).
  const Twiddles tw_w(width);
  const Twiddles tw_h(height);
  std::vector<double> row_re(h * w, 0.0);
  std::vector<double> row_im(h * w, 0.0);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t x = 0; x < w; ++x) {
      double sr = 0.0;
      double si = 0.0;
      for (std::size_t v = 0; v < w; ++v) {
        const std::size_t k = (v * x) % w;
        const double c = tw_w.cos_table[k];
        const double s = tw_w.sin_table[k];
        sr += re[u * w + v] * c - im[u * w + v] * s;
        si += re[u * w + v] * s + im[u * w + v] * c;
      }
      row_re[u * w + x] = sr;
      row_im[u * w + x] = si;
    }
  }
  std::vector<double> field(h * w, 0.0);
  const double norm = 1.0 / static_cast<double>(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double sr = 0.0;
      for (std::size_t u = 0; u < h; ++u) {
        const std::size_t k = (u * y) % h;
        sr += row_re[u * w + x] * tw_h.cos_table[k] - row_im[u * w + x] * tw_h.sin_table[k];
      }
      field[y * w + x] = sr * norm;
    }
  }
  return field;
}

Mask fourier_mask(int height, int width, double lambda, const FourierMaskParams& params, std::uint64_t seed) {
  const std::size_t k = target_count(height, width, lambda);
  if (k == 0) return Mask(height, width, false);
  if (k == static_cast<std::size_t>(height) * width) return Mask(height, width, true);
  const auto field = fourier_field(height, width, params, seed);
  return top_k_mask(height, width, field, k);
}

double sample_lambda(const FourierMaskParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  return rng.beta(params.alpha, params.alpha);
}

Mask saliency_mask(const SaliencyMap& map, double fraction) {
  if (map.height <= 0 || map.width <= 0) throw ShapeError("saliency map has zero size");
  if (map.values.size() != static_cast<std::size_t>(map.height) * map.width) {
    throw ShapeError("saliency map data length mismatch");
  }
  std::vector<double> values(map.values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = map.values[i];
    if (!std::isfinite(v) || v < 0.0f) throw Error("saliency values must be finite and non-negative");
    values[i] = v;
  }
  return top_k_mask(map.height, map.width, values, target_count(map.height, map.width, fraction));
}

MaskBank::MaskBank(std::vector<Mask> masks) : masks_(std::move(masks)) {
  if (masks_.empty()) throw Error("mask bank must not be empty");
  for (const auto& m : masks_) {
    if (m.height() != masks_.front().height() || m.width() != masks_.front().width()) {
      throw ShapeError("mask bank entries differ in shape");
    }
  }
}

MaskBank MaskBank::sample_fourier(std::size_t count, int height, int width, const FourierMaskParams& params,
                                  std::uint64_t seed) {
  std::vector<Mask> masks;
  masks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SeedSequence entry(derive_seed(seed, i));
    const double lambda = sample_lambda(params, entry.derive(0));
    masks.push_back(fourier_mask(height, width, lambda, params, entry.derive(1)));
  }
  return MaskBank(std::move(masks));
}

const Mask& bank_pick(const MaskBank& bank, std::uint64_t seed) {
  if (bank.size() == 0) throw Error("cannot pick from an empty mask bank");
  Rng rng(seed);
  return bank.masks()[rng.uniform_int(bank.size())];
}

}  // namespace occlubench::maskgen
