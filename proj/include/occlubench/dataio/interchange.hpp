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
#include <string>
#include <string_view>
#include <vector>

#include "occlubench/core/types.hpp"
#include "occlubench/maskgen/maskgen.hpp"

namespace occlubench::dataio {

// ---- prediction logs: JSON Lines, one object per record with exactly
// {"split", "index", "true_label", "predicted_label"}.

/// Records sorted by (split, index), one per line.
std::string encode_prediction_log(PredictionLog log);
/// Throws FormatError naming the 1-based line of a malformed record, a
/// missing or extra field, or a duplicate (split, index).
PredictionLog parse_prediction_log(std::string_view text);
void write_prediction_log(const std::filesystem::path& path, const PredictionLog& log);
PredictionLog read_prediction_log(const std::filesystem::path& path);
/// Label range check against a class count.
void check_log_labels(const PredictionLog& log, int num_classes);

// ---- saliency maps: "OBSM" u32 count u32 h u32 w, then count*h*w f32, little-endian.

std::vector<std::uint8_t> encode_saliency(std::span<const SaliencyMap> maps);
std::vector<SaliencyMap> parse_saliency(std::span<const std::uint8_t> bytes);
void write_saliency(const std::filesystem::path& path, std::span<const SaliencyMap> maps);
std::vector<SaliencyMap> read_saliency(const std::filesystem::path& path);

// ---- masks: "OBMK" u32 count u32 h u32 w, then count*h*w bytes (0/1), row-major.

std::vector<std::uint8_t> encode_masks(std::span<const Mask> masks);
std::vector<Mask> parse_masks(std::span<const std::uint8_t> bytes);
void write_masks(const std::filesystem::path& path, std::span<const Mask> masks);
std::vector<Mask> read_masks(const std::filesystem::path& path);

// ---- subset index files: "split=<train|test>" then one index per line.

std::string encode_subset(const SubsetIndex& subset);
SubsetIndex parse_subset(std::string_view text);
SubsetIndex read_subset(const std::filesystem::path& path);
void write_subset(const std::filesystem::path& path, const SubsetIndex& subset);

}  // namespace occlubench::dataio
