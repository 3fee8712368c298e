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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/maskgen/maskgen.hpp"
#include "../support/fourier_oracle.hpp"

using namespace occlubench;
using namespace occlubench::maskgen;

namespace {

// Every (rh, rw) with the closest area, then the most square.
std::vector<RectShape> brute_force_shapes(int h, int w, std::size_t target) {
  if (target == 0) return {{0, 0}};
  long best_area = -1, best_skew = -1;
  std::vector<RectShape> out;
  for (int rh = 1; rh <= h; ++rh) {
    for (int rw = 1; rw <= w; ++rw) {
      const long area = std::labs(static_cast<long>(rh) * rw - static_cast<long>(target));
      const long skew = std::labs(rh - rw);
      if (best_area < 0 || area < best_area || (area == best_area && skew < best_skew)) {
        best_area = area;
        best_skew = skew;
        out.clear();
      }
      if (area == best_area && skew == best_skew) out.push_back({rh, rw});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("target_count rounds and validates") {
  CHECK(target_count(8, 8, 0.3) == 19);
  CHECK(target_count(32, 32, 0.5) == 512);
  CHECK(target_count(3, 3, 0.0) == 0);
  CHECK(target_count(3, 3, 1.0) == 9);
  CHECK_THROWS_AS(target_count(3, 3, 1.01), Error);
  CHECK_THROWS_AS(target_count(3, 3, -0.1), Error);
}

TEST_CASE("top_k_mask breaks ties by ascending index") {
  const std::vector<double> v{1.0, 3.0, 3.0, 2.0};
  auto m = top_k_mask(2, 2, v, 1);
  CHECK(testing::covered_indices(m) == std::vector<std::size_t>{1});
  m = top_k_mask(2, 2, v, 3);
  CHECK(testing::covered_indices(m) == std::vector<std::size_t>{1, 2, 3});
  const std::vector<double> flat(9, 0.5);
  CHECK(testing::covered_indices(top_k_mask(3, 3, flat, 4)) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("closest_rect_shapes: 4x4 grid, area 4 is the 2x2 square") {
  const auto shapes = closest_rect_shapes(4, 4, 4);
  REQUIRE(shapes.size() == 1);
  CHECK(shapes[0] == RectShape{2, 2});
}

TEST_CASE("closest_rect_shapes agrees with exhaustive enumeration") {
  Rng r(77);
  for (int trial = 0; trial < 400; ++trial) {
    const int h = 1 + static_cast<int>(r.uniform_int(20));
    const int w = 1 + static_cast<int>(r.uniform_int(20));
    const std::size_t target = r.uniform_int(static_cast<std::uint64_t>(h) * w + 1);
    auto got = closest_rect_shapes(h, w, target);
    auto want = brute_force_shapes(h, w, target);
    auto key = [](const RectShape& s) { return std::pair(s.height, s.width); };
    std::sort(got.begin(), got.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    std::sort(want.begin(), want.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    CHECK(got == want);
  }
}

TEST_CASE("rect_mask is one rectangle inside the grid with the closest area") {
  Rng r(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = 1 + static_cast<int>(r.uniform_int(32));
    const int w = 1 + static_cast<int>(r.uniform_int(32));
    const double f = r.uniform();
    const Mask m = rect_mask(h, w, f, r.next_u64());
    const std::size_t target = target_count(h, w, f);
    const auto shapes = brute_force_shapes(h, w, target);
    CHECK(m.covered_count() == static_cast<std::size_t>(shapes.front().height) * shapes.front().width);
    // Covered cells form a solid axis-aligned box.
    int top = h, left = w, bottom = -1, right = -1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.at(y, x)) {
          top = std::min(top, y);
          left = std::min(left, x);
          bottom = std::max(bottom, y);
          right = std::max(right, x);
        }
      }
    }
    if (m.covered_count() > 0) {
      CHECK(static_cast<std::size_t>((bottom - top + 1) * (right - left + 1)) == m.covered_count());
    }
  }
}

TEST_CASE("rect_mask placement is uniform over valid offsets") {
  // A 2x2 patch on a 4x4 grid has 9 positions.
  std::vector<int> counts(16, 0);
  for (std::uint64_t s = 0; s < 9000; ++s) {
    const Mask m = rect_mask(4, 4, 0.25, derive_seed(99, s));
    const auto cov = testing::covered_indices(m);
    ++counts[cov.front()];
  }
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) CHECK(std::abs(counts[y * 4 + x] - 1000) < 120);
  }
  CHECK(counts[3] == 0);
  CHECK(counts[12] == 0);
}

TEST_CASE("fourier_field equals a direct complex inverse DFT of the scaled noise") {
  for (auto [h, w] : {std::pair{8, 8}, std::pair{5, 7}, std::pair{1, 6}}) {
    const FourierMaskParams params{2.5, 1.0};
    const std::uint64_t seed = 1234 + h * 31 + w;
    const auto field = fourier_field(h, w, params, seed);
    const auto want = testing::direct_fourier_field(h, w, params, seed);
    for (std::size_t i = 0; i < field.size(); ++i) CHECK(field[i] == doctest::Approx(want[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("fourier_mask: 8x8 at lambda 0.3 covers 19 pixels, the top of its field") {
  const FourierMaskParams params;
  const Mask m = fourier_mask(8, 8, 0.3, params, 42);
  CHECK(m.covered_count() == 19);
  const auto field = fourier_field(8, 8, params, 42);
  CHECK(testing::covered_indices(m) == testing::sorted_top_k(field, 19));
}

TEST_CASE("fourier_mask boundary fractions") {
  const FourierMaskParams params;
  CHECK(fourier_mask(6, 6, 0.0, params, 1).covered_count() == 0);
  CHECK(fourier_mask(6, 6, 1.0, params, 1).covered_count() == 36);
  CHECK(fourier_mask(6, 6, 0.5, params, 9) == fourier_mask(6, 6, 0.5, params, 9));
  CHECK_THROWS_AS(fourier_mask(6, 6, 0.5, FourierMaskParams{-1.0, 1.0}, 1), Error);
}

TEST_CASE("sample_lambda under Beta(1, 1) is uniform") {
  const FourierMaskParams params;
  const int n = 40000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = sample_lambda(params, derive_seed(3, i));
    REQUIRE(l >= 0.0);
    REQUIRE(l <= 1.0);
    s += l;
    s2 += l * l;
  }
  const double mean = s / n;
  CHECK(std::abs(mean - 0.5) < 0.01);
  CHECK(std::abs(s2 / n - mean * mean - 1.0 / 12.0) < 0.005);
}

TEST_CASE("saliency_mask covers the most salient pixels") {
  SaliencyMap map{2, 2, {0.1f, 0.4f, 0.4f, 0.2f}};
  CHECK(testing::covered_indices(saliency_mask(map, 0.5)) == std::vector<std::size_t>{1, 2});
  CHECK(testing::covered_indices(saliency_mask(map, 0.25)) == std::vector<std::size_t>{1});
  CHECK(testing::covered_indices(saliency_mask(map, 0.75)) == std::vector<std::size_t>{1, 2, 3});
  SaliencyMap flat{3, 3, std::vector<float>(9, 0.0f)};
  CHECK(testing::covered_indices(saliency_mask(flat, 2.0 / 9.0)) == std::vector<std::size_t>{0, 1});
  SaliencyMap bad{1, 2, {0.1f, -0.5f}};
  CHECK_THROWS_AS(saliency_mask(bad, 0.5), Error);
  SaliencyMap nan_map{1, 2, {0.1f, std::nanf("")}};
  CHECK_THROWS_AS(saliency_mask(nan_map, 0.5), Error);
}

TEST_CASE("mask banks") {
  CHECK_THROWS_AS(MaskBank({}), Error);
  CHECK_THROWS_AS(MaskBank({Mask(2, 2), Mask(3, 3)}), ShapeError);
  const auto bank = MaskBank::sample_fourier(3, 16, 16, FourierMaskParams{}, 8);
  REQUIRE(bank.size() == 3);
  CHECK(bank.masks()[0] != bank.masks()[1]);
  // Entry i uses derive(seed, i): lambda from its child 0, mask from child 1.
  const std::uint64_t s1 = derive_seed(8, 1);
  const double l1 = sample_lambda(FourierMaskParams{}, derive_seed(s1, 0));
  CHECK(bank.masks()[1] == fourier_mask(16, 16, l1, FourierMaskParams{}, derive_seed(s1, 1)));

  std::vector<int> counts(3, 0);
  for (std::uint64_t s = 0; s < 30000; ++s) {
    const Mask& m = bank_pick(bank, derive_seed(17, s));
    for (int k = 0; k < 3; ++k) {
      if (&m == &bank.masks()[k]) ++counts[k];
    }
  }
  for (int c : counts) CHECK(std::abs(c - 10000) <= 300);
}
