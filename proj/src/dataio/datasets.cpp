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

#include "occlubench/dataio/datasets.hpp"

#include <algorithm>
#include <cmath>

#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/bytes.hpp"
#include "occlubench/core/error.hpp"
#include "occlubench/core/random.hpp"
#include "occlubench/core/seed.hpp"

namespace occlubench::dataio {

Normalization Normalization::fit(const LabeledDataset& unit_range) {
  if (unit_range.size() == 0) throw Error("cannot fit normalization on an empty dataset");
  const int channels = unit_range.images[0].channels();
  Normalization norm;
  norm.mean.assign(static_cast<std::size_t>(channels), 0.0);
  norm.std.assign(static_cast<std::size_t>(channels), 0.0);
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& img : unit_range.images) {
      for (double v : img.plane(c)) sum += v;
      count += img.plane_size();
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& img : unit_range.images) {
      for (double v : img.plane(c)) ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    norm.mean[static_cast<std::size_t>(c)] = mean;
    norm.std[static_cast<std::size_t>(c)] = sd > 0.0 ? sd : 1.0;
  }
  return norm;
}

Normalization Normalization::identity(int channels) {
  return {std::vector<double>(static_cast<std::size_t>(channels), 0.0),
          std::vector<double>(static_cast<std::size_t>(channels), 1.0)};
}

void Normalization::apply(LabeledDataset& dataset) const {
  for (auto& img : dataset.images) {
    if (static_cast<std::size_t>(img.channels()) != mean.size() || std.size() != mean.size()) {
      throw ShapeError("normalization has " + std::to_string(mean.size()) + " channels, image has " +
                       std::to_string(img.channels()));
    }
    auto data = img.mutable_data();
    const std::size_t plane = img.plane_size();
    for (int c = 0; c < img.channels(); ++c) {
      const double m = mean[static_cast<std::size_t>(c)];
      const double s = std[static_cast<std::size_t>(c)];
      for (std::size_t p = 0; p < plane; ++p) data[c * plane + p] = (data[c * plane + p] - m) / s;
    }
  }
}

std::uint8_t Normalization::to_byte(int channel, double value) const {
  const auto c = static_cast<std::size_t>(channel);
  const double unit = value * std[c] + mean[c];
  return static_cast<std::uint8_t>(std::clamp(std::lround(unit * 255.0), 0L, 255L));
}

LabeledDataset parse_cifar10(std::span<const std::uint8_t> bytes, Split split, int num_classes) {
  if (bytes.size() % kCifarRecordSize != 0) {
    throw FormatError("CIFAR-10: size " + std::to_string(bytes.size()) + " is not a multiple of " +
                      std::to_string(kCifarRecordSize) + " (truncated file?)");
  }
  LabeledDataset out;
  out.split = split;
  out.num_classes = num_classes;
  const std::size_t count = bytes.size() / kCifarRecordSize;
  out.images.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const auto record = bytes.subspan(r * kCifarRecordSize, kCifarRecordSize);
    if (record[0] >= num_classes) {
      throw FormatError("CIFAR-10: record " + std::to_string(r) + " has label byte " + std::to_string(record[0]));
    }
    std::vector<double> pixels(3 * 1024);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = record[1 + i] / 255.0;
    out.images.emplace_back(3, 32, 32, std::move(pixels));
    out.labels.push_back(record[0]);
  }
  return out;
}

LabeledDataset load_cifar10(std::span<const std::filesystem::path> paths, Split split, int num_classes) {
  LabeledDataset out;
  out.split = split;
  out.num_classes = num_classes;
  for (const auto& path : paths) {
    try {
      auto part = parse_cifar10(read_file_bytes(path), split, num_classes);
      for (auto& img : part.images) out.images.push_back(std::move(img));
      out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_cifar10(const LabeledDataset& dataset, const Normalization& norm) {
  std::vector<std::uint8_t> out;
  out.reserve(dataset.size() * kCifarRecordSize);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& img = dataset.images[i];
    if (img.channels() != 3 || img.height() != 32 || img.width() != 32) {
      throw ShapeError("CIFAR-10 records hold 3x32x32 images");
    }
    if (dataset.labels[i] < 0 || dataset.labels[i] > 255) throw FormatError("label does not fit a byte");
    out.push_back(static_cast<std::uint8_t>(dataset.labels[i]));
    for (int c = 0; c < 3; ++c) {
      for (double v : img.plane(c)) out.push_back(norm.to_byte(c, v));
    }
  }
  return out;
}

LabeledDataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels, Split split,
                         int num_classes) {
  ByteReader img(images, "IDX images");
  ByteReader lab(labels, "IDX labels");
  if (img.u32_be() != 0x00000803) throw FormatError("IDX images: bad magic (expected 0x00000803)");
  if (lab.u32_be() != 0x00000801) throw FormatError("IDX labels: bad magic (expected 0x00000801)");
  const std::uint32_t n = img.u32_be();
  const std::uint32_t rows = img.u32_be();
  const std::uint32_t cols = img.u32_be();
  const std::uint32_t n_labels = lab.u32_be();
  if (n != n_labels) {
    throw FormatError("IDX: " + std::to_string(n) + " images but " + std::to_string(n_labels) + " labels");
  }
  if (rows == 0 || cols == 0) throw FormatError("IDX images: zero dimension");
  const std::uint64_t pixels = static_cast<std::uint64_t>(rows) * cols;
  if (img.remaining() != pixels * n) throw FormatError("IDX images: payload length does not match the header");
  if (lab.remaining() != n) throw FormatError("IDX labels: payload length does not match the header");
  LabeledDataset out;
  out.split = split;
  out.num_classes = num_classes;
  out.images.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto raw = img.take(static_cast<std::size_t>(pixels));
    std::vector<double> data(raw.size());
    for (std::size_t p = 0; p < raw.size(); ++p) data[p] = raw[p] / 255.0;
    out.images.emplace_back(1, static_cast<int>(rows), static_cast<int>(cols), std::move(data));
    const std::uint8_t label = lab.u8();
    if (label >= num_classes) throw FormatError("IDX labels: label " + std::to_string(label) + " of item " +
                                                std::to_string(i) + " out of range");
    out.labels.push_back(label);
  }
  return out;
}

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, Split split,
                        int num_classes) {
  return parse_idx(read_file_bytes(images), read_file_bytes(labels), split, num_classes);
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> encode_idx(const LabeledDataset& dataset,
                                                                           const Normalization& norm) {
  auto put_be = [](std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  };
  std::vector<std::uint8_t> images;
  std::vector<std::uint8_t> labels;
  const int rows = dataset.size() ? dataset.images[0].height() : 0;
  const int cols = dataset.size() ? dataset.images[0].width() : 0;
  put_be(images, 0x00000803);
  put_be(images, static_cast<std::uint32_t>(dataset.size()));
  put_be(images, static_cast<std::uint32_t>(rows));
  put_be(images, static_cast<std::uint32_t>(cols));
  put_be(labels, 0x00000801);
  put_be(labels, static_cast<std::uint32_t>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& img = dataset.images[i];
    if (img.channels() != 1) throw ShapeError("IDX output holds single-channel images");
    for (double v : img.plane(0)) images.push_back(norm.to_byte(0, v));
    labels.push_back(static_cast<std::uint8_t>(dataset.labels[i]));
  }
  return {std::move(images), std::move(labels)};
}

namespace {

bool inside_shape(int shape, double dy, double dx, double a, double b) {
  switch (shape) {
    case 0:  // square, half side a
      return std::abs(dy) <= a && std::abs(dx) <= a;
    case 1:  // disc, radius a
      return dy * dy + dx * dx <= a * a;
    case 2:  // plus, arm a, half thickness b
      return (std::abs(dy) <= b && std::abs(dx) <= a) || (std::abs(dx) <= b && std::abs(dy) <= a);
    case 3: {  // ring, outer a, inner b
      const double r2 = dy * dy + dx * dx;
      return r2 <= a * a && r2 >= b * b;
    }
    case 4:  // horizontal bar, half width a, half height b
      return std::abs(dx) <= a && std::abs(dy) <= b;
    default: {  // triangle pointing up, half height a
      if (dy < -a || dy > a) return false;
      const double half_width = (dy + a) * 0.5;
      return std::abs(dx) <= half_width;
    }
  }
}

}  // namespace

LabeledDataset gen_synthetic(const SyntheticSpec& spec, Split split) {
  if (spec.classes < 2) throw Error("synthetic data needs at least two classes");
  if (spec.per_class < 0 || spec.size < 4 || (spec.channels != 1 && spec.channels != 3) ||
      !(spec.shape_scale > 0.0)) {
    throw Error("invalid synthetic dataset spec");
  }
  LabeledDataset out;
  out.split = split;
  out.num_classes = spec.classes;
  const int size = spec.size;
  const double s = size / 32.0;
  const std::size_t total = static_cast<std::size_t>(spec.classes) * static_cast<std::size_t>(spec.per_class);
  out.images.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(spec.classes));
    const int shape = label % 6;
    Rng rng(derive_seed(spec.seed, i));
    const double cy = size / 2.0 + (2.0 * rng.uniform() - 1.0) * spec.jitter * s;
    const double cx = size / 2.0 + (2.0 * rng.uniform() - 1.0) * spec.jitter * s;
    double a = 0.0;
    double b = 0.0;
    switch (shape) {
      case 0: a = (6.0 + rng.uniform()) * s; break;
      case 1: a = (4.5 + rng.uniform()) * s; break;
      case 2: a = (6.0 + rng.uniform()) * s; b = 1.5 * s; break;
      case 3: a = (6.0 + rng.uniform()) * s; b = a - 2.5 * s; break;
      case 4: a = (8.0 + 2.0 * rng.uniform()) * s; b = (2.0 + rng.uniform()) * s; break;
      default: a = (5.5 + rng.uniform()) * s; break;
    }
    a *= spec.shape_scale;
    b *= spec.shape_scale;
    std::vector<double> tint(static_cast<std::size_t>(spec.channels), 1.0);
    for (auto& t : tint) t = 1.0 - spec.tint * rng.uniform();

    Image img(spec.channels, size, size, 0.0);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        if (!inside_shape(shape, y + 0.5 - cy, x + 0.5 - cx, a, b)) continue;
        for (int c = 0; c < spec.channels; ++c) img.at(c, y, x) = tint[static_cast<std::size_t>(c)];
      }
    }
    for (int k = 0; k < spec.clutter; ++k) {
      const int side = 2 + static_cast<int>(rng.uniform_int(3));
      const int top = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(size - side + 1)));
      const int left = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(size - side + 1)));
      const double value = 0.3 + 0.7 * rng.uniform();
      for (int y = top; y < top + side; ++y) {
        for (int x = left; x < left + side; ++x) {
          for (int c = 0; c < spec.channels; ++c) img.at(c, y, x) = value;
        }
      }
    }
    if (spec.noise > 0.0) {
      for (double& v : img.mutable_data()) v = std::clamp(v + spec.noise * rng.normal(), 0.0, 1.0);
    }
    out.images.push_back(std::move(img));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace occlubench::dataio
