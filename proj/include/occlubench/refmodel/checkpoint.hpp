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

#include "occlubench/refmodel/tiny_cnn.hpp"

namespace occlubench::refmodel {

// Layout, all integers little-endian:
//
//   "OBNN"  u32 version (=1)
//   u32 input_channels  u32 input_height  u32 input_width  u32 num_classes
//   u32 layer_count
//   per layer:
//     u32 kind (1 = conv, 2 = dense)  u32 inputs  u32 outputs  u32 kernel (1 for dense)
//     u64 weight_count  u64 bias_count
//     weight_count x f64 weights, bias_count x f64 biases
//
// Conv weights are [out][in][ky][kx]; dense weights are [out][in].

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const TinyCnn& model);
/// Throws FormatError on any layout violation.
TinyCnn decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const TinyCnn& model, const std::filesystem::path& path);
TinyCnn load_checkpoint(const std::filesystem::path& path);

}  // namespace occlubench::refmodel
