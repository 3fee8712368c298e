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
#include <string>
#include <string_view>
#include <vector>

namespace occlubench {

enum class Split : std::uint8_t { kTrain, kTest };

std::string_view to_string(Split split);
/// Accepts "train" or "test"; throws FormatError otherwise.
Split parse_split(std::string_view text);

/// Channel-planar, row-major image of pre-normalized pixel values.
class Image {
 public:
  Image() = default;
  Image(int channels, int height, int width, double fill = 0.0);
  /// Throws ShapeError if data length disagrees with the shape and
  /// FormatError if any value is non-finite.
  Image(int channels, int height, int width, std::vector<double> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> mutable_data() { return data_; }
  std::span<const double> plane(int c) const { return {data_.data() + c * plane_size(), plane_size()}; }

  double at(int c, int y, int x) const { return data_[(c * plane_size()) + y * width_ + x]; }
  double& at(int c, int y, int x) { return data_[(c * plane_size()) + y * width_ + x]; }

  bool same_shape(const Image& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Per-pixel binary cover map; true means occluded.
class Mask {
 public:
  Mask() = default;
  Mask(int height, int width, bool value = false);
  Mask(int height, int width, std::vector<std::uint8_t> covered);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return covered_.size(); }

  bool at(int y, int x) const { return covered_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int y, int x, bool value) { covered_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0; }
  bool at_index(std::size_t i) const { return covered_[i] != 0; }
  void set_index(std::size_t i, bool value) { covered_[i] = value ? 1 : 0; }

  std::span<const std::uint8_t> covered() const { return covered_; }
  std::size_t covered_count() const;
  /// Achieved fraction, #covered / (h*w). Zero for an empty grid.
  double covered_fraction() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> covered_;
};

/// Non-negative per-pixel importance, aligned with an image.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;
};

struct LabeledDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int num_classes = 0;
  Split split = Split::kTrain;
  /// Identifier carried into prediction records; empty means position.
  std::vector<std::int64_t> ids;

  std::size_t size() const { return images.size(); }
  std::int64_t id_of(std::size_t position) const {
    return ids.empty() ? static_cast<std::int64_t>(position) : ids[position];
  }
  /// Checks label ranges, image count and uniform shape. Throws on violation.
  void validate() const;
};

struct PredictionRecord {
  Split split = Split::kTest;
  std::int64_t index = 0;
  int true_label = 0;
  int predicted_label = 0;

  bool correct() const { return true_label == predicted_label; }
  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

using PredictionLog = std::vector<PredictionRecord>;

/// Sorts by (split, index), train first.
void sort_log(PredictionLog& log);

/// Sorted, duplicate-free indices into one split of a dataset.
struct SubsetIndex {
  Split split = Split::kTest;
  std::vector<std::int64_t> indices;

  /// Throws FormatError on unsorted, duplicate or out-of-range entries.
  void validate(std::size_t dataset_size) const;
};

/// Keeps the images listed in the subset; ids refer to the original positions.
LabeledDataset filter_dataset(const LabeledDataset& dataset, const SubsetIndex& subset);
/// Keeps records whose (split, index) is listed by the subset; other splits pass through.
PredictionLog filter_log(const PredictionLog& log, const SubsetIndex& subset);

}  // namespace occlubench
