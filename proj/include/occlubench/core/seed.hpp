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

namespace occlubench {

/// Root of a tree of independent random streams.
///
/// Child seeds come from the SplitMix64 output function applied to
/// `base + 0x9E3779B97F4A7C15 * (index + 1)`:
///
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     z =  z ^ (z >> 31)
///
/// so derive(0, k) reproduces the k-th output of a SplitMix64 generator
/// seeded with 0. Per-item randomness is always derive(base, item), never
/// a shared sequential stream, which keeps serial and parallel runs equal.
class SeedSequence {
 public:
  constexpr explicit SeedSequence(std::uint64_t base) : base_(base) {}

  constexpr std::uint64_t base() const { return base_; }
  constexpr std::uint64_t derive(std::uint64_t index) const;
  constexpr SeedSequence child(std::uint64_t index) const { return SeedSequence(derive(index)); }

 private:
  std::uint64_t base_;
};

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t SeedSequence::derive(std::uint64_t index) const { return derive_seed(base_, index); }

/// Stream tags used to split one run seed into unrelated purposes.
namespace stream {
inline constexpr std::uint64_t kInit = 0x1001;
inline constexpr std::uint64_t kShuffle = 0x1002;
inline constexpr std::uint64_t kMix = 0x1003;
inline constexpr std::uint64_t kLabels = 0x1004;
inline constexpr std::uint64_t kMasks = 0x1005;
inline constexpr std::uint64_t kDonors = 0x1006;
inline constexpr std::uint64_t kData = 0x1007;
inline constexpr std::uint64_t kEvalSeeds = 0x1008;
}  // namespace stream

}  // namespace occlubench
