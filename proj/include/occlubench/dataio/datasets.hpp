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
#include <filesystem>
#include <span>
#include <vector>

#include "occlubench/core/types.hpp"

namespace occlubench::dataio {

/// Per-channel affine preprocessing: x = (pixel / 255 - mean[c]) / std[c].
struct Normalization {
  std::vector<double> mean;
  std::vector<double> std;

  /// Mean and population std per channel of a [0, 1]-valued dataset.
  /// A zero std is replaced by 1.
  static Normalization fit(const LabeledDataset& unit_range);
  static Normalization identity(int channels);

  void apply(LabeledDataset& dataset) const;
  /// Maps a normalized value back to [0, 255], rounded and clamped.
  std::uint8_t to_byte(int channel, double value) const;
};

// ---- CIFAR-10 binary: 3073-byte records, 1 label byte + 3 x 1024 channel-planar pixels.

inline constexpr std::size_t kCifarRecordSize = 3073;

/// Pixels scaled to [0, 1]. Throws FormatError when the size is not a
/// multiple of the record size or a label byte is >= num_classes.
LabeledDataset parse_cifar10(std::span<const std::uint8_t> bytes, Split split, int num_classes = 10);
LabeledDataset load_cifar10(std::span<const std::filesystem::path> paths, Split split, int num_classes = 10);
/// Writes a 3x32x32 dataset; values are de-normalized with `norm`.
std::vector<std::uint8_t> encode_cifar10(const LabeledDataset& dataset, const Normalization& norm);

// ---- IDX (big-endian): images magic 0x00000803 [n rows cols], labels 0x00000801 [n].

LabeledDataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels, Split split,
                         int num_classes = 10);
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, Split split,
                        int num_classes = 10);
/// Returns {images file, labels file} for a 1-channel dataset.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> encode_idx(const LabeledDataset& dataset,
                                                                           const Normalization& norm);

// ---- synthetic shapes

/// Class-conditional shapes for minute-scale experiments. Class c draws
/// shape c mod 6 (square, disc, plus, ring, horizontal bar, triangle) with
/// positional and size jitter, optional per-image tint, clutter squares and
/// Gaussian pixel noise, clipped to [0, 1]. Image i has class i mod classes
/// and is generated from derive(seed, i).
struct SyntheticSpec {
  int classes = 3;
  int per_class = 100;
  int size = 32;
  int channels = 3;
  double noise = 0.0;
  /// Max shift of the shape centre in pixels at 32x32 (scaled with size).
  double jitter = 6.0;
  /// Multiplies the shape dimensions (1 = about 13 pixels across at 32x32).
  double shape_scale = 1.0;
  /// Per-channel intensity drawn from [1 - tint, 1].
  double tint = 0.0;
  int clutter = 0;
  std::uint64_t seed = 0;
};

LabeledDataset gen_synthetic(const SyntheticSpec& spec, Split split);

}  // namespace occlubench::dataio
