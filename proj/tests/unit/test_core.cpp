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

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "doctest.h"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/bytes.hpp"
#include "occlubench/core/error.hpp"
#include "occlubench/core/parallel.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"
#include "occlubench/core/stats.hpp"
#include "occlubench/core/types.hpp"
#include "../support/temp_dir.hpp"

using namespace occlubench;

TEST_CASE("derive_seed matches SplitMix64 reference outputs") {
  // First outputs of the reference SplitMix64 generator seeded with 0 and 42.
  CHECK(derive_seed(0, 0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(0, 1) == 0x6e789e6aa1b965f4ULL);
  CHECK(derive_seed(42, 0) == 0xbdd732262feb6e95ULL);
  CHECK(derive_seed(42, 7) == 0xccf635ee9e9e2fa4ULL);
  static_assert(SeedSequence(5).derive(3) == derive_seed(5, 3));
  CHECK(SeedSequence(9).child(2).base() == derive_seed(9, 2));
}

TEST_CASE("Rng draws are reproducible and in range") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    ++counts[r.uniform_int(5)];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("normal, gamma and beta moments") {
  Rng r(11);
  const int n = 40000;
  double s = 0, s2 = 0, g = 0, b = 0, b2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    g += r.gamma(2.5);
    const double x = r.beta(2.0, 5.0);
    b += x;
    b2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
  CHECK(std::abs(g / n - 2.5) < 0.05);
  // Beta(2, 5): mean 2/7, variance 10/392.
  CHECK(std::abs(b / n - 2.0 / 7.0) < 0.005);
  CHECK(std::abs(b2 / n - (b / n) * (b / n) - 10.0 / 392.0) < 0.002);
}

TEST_CASE("permutation is a bijection") {
  Rng r(5);
  auto p = r.permutation(100);
  std::set<std::size_t> seen(p.begin(), p.end());
  CHECK(seen.size() == 100);
  CHECK(*seen.rbegin() == 99);
}

TEST_CASE("aggregate_seeds uses the sample std") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto ms = aggregate_seeds(v);
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(ms.n == 4);
  const std::vector<double> one{0.7};
  CHECK(aggregate_seeds(one).std == 0.0);
  CHECK_THROWS_AS(aggregate_seeds(std::span<const double>{}), Error);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  ::setenv("OCCLUBENCH_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  std::vector<int> hits(1001, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1001);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw Error("boom");
                  }),
                  Error);
  ::unsetenv("OCCLUBENCH_THREADS");
}

TEST_CASE("byte reader is bounds-checked and little-endian") {
  ByteWriter w;
  w.put_magic("ABCD");
  w.put_u32(0x01020304u);
  w.put_f32(1.5f);
  auto bytes = w.take();
  REQUIRE(bytes.size() == 12);
  CHECK(bytes[4] == 0x04);
  CHECK(bytes[7] == 0x01);
  ByteReader r(bytes, "test");
  r.expect_magic("ABCD");
  CHECK(r.u32_le() == 0x01020304u);
  CHECK(r.f32_le() == 1.5f);
  CHECK(r.remaining() == 0);
  CHECK_THROWS_AS(r.u8(), FormatError);
  ByteReader bad(bytes, "test");
  CHECK_THROWS_AS(bad.expect_magic("ABCE"), FormatError);
}

TEST_CASE("atomic writes create parents and leave no temp file") {
  testing::TempDir dir("atomic");
  const auto path = dir / "a/b/out.txt";
  write_file_atomic(path, std::string_view("hello"));
  write_file_atomic(path, std::string_view("world"));
  const auto bytes = read_file_bytes(path);
  CHECK(std::string(bytes.begin(), bytes.end()) == "world");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  CHECK_THROWS_AS(read_file_bytes(dir / "missing"), Error);
}

TEST_CASE("image and mask basics") {
  CHECK_THROWS_AS(Image(1, 2, 2, std::vector<double>(3, 0.0)), ShapeError);
  CHECK_THROWS_AS(Image(1, 1, 1, std::vector<double>{std::nan("")}), FormatError);
  Image img(2, 2, 3, 0.0);
  img.at(1, 1, 2) = 5.0;
  CHECK(img.data()[1 * 6 + 1 * 3 + 2] == 5.0);
  Mask m(2, 2);
  m.set(1, 0, true);
  CHECK(m.covered_count() == 1);
  CHECK(m.covered_fraction() == 0.25);
  CHECK(m.at_index(2));
}

TEST_CASE("sort_log, filter_dataset and filter_log keep original ids") {
  PredictionLog log{{Split::kTest, 2, 0, 0}, {Split::kTrain, 5, 1, 1}, {Split::kTest, 0, 1, 0}};
  sort_log(log);
  CHECK(log[0].split == Split::kTrain);
  CHECK(log[1].index == 0);
  CHECK(log[2].index == 2);

  LabeledDataset ds;
  ds.num_classes = 2;
  ds.split = Split::kTest;
  for (int i = 0; i < 5; ++i) {
    ds.images.emplace_back(1, 1, 1, static_cast<double>(i));
    ds.labels.push_back(i % 2);
  }
  SubsetIndex subset{Split::kTest, {1, 3}};
  const auto f = filter_dataset(ds, subset);
  REQUIRE(f.size() == 2);
  CHECK(f.id_of(0) == 1);
  CHECK(f.id_of(1) == 3);
  CHECK(f.images[1].at(0, 0, 0) == 3.0);
  CHECK_THROWS_AS(filter_dataset(ds, SubsetIndex{Split::kTest, {3, 1}}), FormatError);
  CHECK_THROWS_AS(filter_dataset(ds, SubsetIndex{Split::kTest, {9}}), FormatError);

  const auto fl = filter_log(log, SubsetIndex{Split::kTest, {2}});
  REQUIRE(fl.size() == 2);
  CHECK(fl[0].split == Split::kTrain);
  CHECK(fl[1].index == 2);
}
