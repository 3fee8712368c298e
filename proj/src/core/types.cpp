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

#include "occlubench/core/types.hpp"

#include <algorithm>
#include <cmath>

#include "occlubench/core/error.hpp"

namespace occlubench {

std::string_view to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  throw FormatError("unknown split '" + std::string(text) + "' (expected train or test)");
}

Image::Image(int channels, int height, int width, double fill)
    : channels_(channels),
      height_(height),
      width_(width),
      data_(static_cast<std::size_t>(std::max(0, channels)) * std::max(0, height) * std::max(0, width), fill) {
  if (channels <= 0 || height <= 0 || width <= 0) throw ShapeError("image dimensions must be positive");
}

Image::Image(int channels, int height, int width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (channels <= 0 || height <= 0 || width <= 0) throw ShapeError("image dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw ShapeError("image data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw FormatError("image contains a non-finite value");
  }
}

Mask::Mask(int height, int width, bool value)
    : height_(height), width_(width), covered_(static_cast<std::size_t>(height) * width, value ? 1 : 0) {
  if (height < 0 || width < 0) throw ShapeError("mask dimensions must be non-negative");
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> covered)
    : height_(height), width_(width), covered_(std::move(covered)) {
  if (height < 0 || width < 0) throw ShapeError("mask dimensions must be non-negative");
  if (covered_.size() != static_cast<std::size_t>(height) * width) throw ShapeError("mask data length mismatch");
  for (auto& v : covered_) {
    if (v > 1) throw FormatError("mask cells must be 0 or 1");
  }
}

std::size_t Mask::covered_count() const {
  return static_cast<std::size_t>(std::count(covered_.begin(), covered_.end(), std::uint8_t{1}));
}

double Mask::covered_fraction() const {
  if (covered_.empty()) return 0.0;
  return static_cast<double>(covered_count()) / static_cast<double>(covered_.size());
}

void LabeledDataset::validate() const {
  if (images.size() != labels.size()) throw ShapeError("dataset has different image and label counts");
  if (!ids.empty() && ids.size() != images.size()) throw ShapeError("dataset id list length mismatch");
  if (num_classes <= 0) throw FormatError("dataset must declare at least one class");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw FormatError("label " + std::to_string(labels[i]) + " of image " + std::to_string(i) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (!images[i].same_shape(images[0])) throw ShapeError("dataset images differ in shape");
  }
}

void sort_log(PredictionLog& log) {
  std::sort(log.begin(), log.end(), [](const PredictionRecord& a, const PredictionRecord& b) {
    if (a.split != b.split) return a.split < b.split;
    return a.index < b.index;
  });
}

void SubsetIndex::validate(std::size_t dataset_size) const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= dataset_size) {
      throw FormatError("subset index " + std::to_string(indices[i]) + " out of range for dataset of size " +
                        std::to_string(dataset_size));
    }
    if (i > 0 && indices[i] <= indices[i - 1]) throw FormatError("subset indices must be sorted and unique");
  }
}

LabeledDataset filter_dataset(const LabeledDataset& dataset, const SubsetIndex& subset) {
  if (subset.split != dataset.split) throw Error("subset split does not match dataset split");
  subset.validate(dataset.size());
  LabeledDataset out;
  out.num_classes = dataset.num_classes;
  out.split = dataset.split;
  for (std::int64_t idx : subset.indices) {
    auto pos = static_cast<std::size_t>(idx);
    out.images.push_back(dataset.images[pos]);
    out.labels.push_back(dataset.labels[pos]);
    out.ids.push_back(dataset.id_of(pos));
  }
  return out;
}

PredictionLog filter_log(const PredictionLog& log, const SubsetIndex& subset) {
  PredictionLog out;
  for (const auto& rec : log) {
    if (rec.split != subset.split ||
        std::binary_search(subset.indices.begin(), subset.indices.end(), rec.index)) {
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace occlubench
