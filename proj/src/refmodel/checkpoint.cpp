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

#include "occlubench/refmodel/checkpoint.hpp"

#include <cmath>
#include <string>

#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/bytes.hpp"
#include "occlubench/core/error.hpp"

namespace occlubench::refmodel {
namespace {

constexpr std::uint32_t kConvKind = 1;
constexpr std::uint32_t kDenseKind = 2;

void put_block(ByteWriter& out, std::span<const double> params, std::size_t offset, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out.put_f64(params[offset + i]);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TinyCnn& model) {
  const auto& shape = model.shape();
  const auto params = model.parameters();
  ByteWriter out;
  out.put_magic("OBNN");
  out.put_u32(kCheckpointVersion);
  out.put_u32(static_cast<std::uint32_t>(shape.input_channels));
  out.put_u32(static_cast<std::uint32_t>(shape.input_height));
  out.put_u32(static_cast<std::uint32_t>(shape.input_width));
  out.put_u32(static_cast<std::uint32_t>(shape.num_classes));
  out.put_u32(static_cast<std::uint32_t>(model.conv_layers().size() + 1));
  for (const auto& g : model.conv_layers()) {
    const std::size_t weights = static_cast<std::size_t>(g.out_channels) * g.taps();
    out.put_u32(kConvKind);
    out.put_u32(static_cast<std::uint32_t>(g.in_channels));
    out.put_u32(static_cast<std::uint32_t>(g.out_channels));
    out.put_u32(static_cast<std::uint32_t>(g.kernel));
    out.put_u64(weights);
    out.put_u64(static_cast<std::uint64_t>(g.out_channels));
    put_block(out, params, g.weight_offset, weights);
    put_block(out, params, g.bias_offset, static_cast<std::size_t>(g.out_channels));
  }
  const auto& d = model.dense();
  const std::size_t weights = static_cast<std::size_t>(d.inputs) * d.outputs;
  out.put_u32(kDenseKind);
  out.put_u32(static_cast<std::uint32_t>(d.inputs));
  out.put_u32(static_cast<std::uint32_t>(d.outputs));
  out.put_u32(1);
  out.put_u64(weights);
  out.put_u64(static_cast<std::uint64_t>(d.outputs));
  put_block(out, params, d.weight_offset, weights);
  put_block(out, params, d.bias_offset, static_cast<std::size_t>(d.outputs));
  return out.take();
}

TinyCnn decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes, "checkpoint");
  in.expect_magic("OBNN");
  const auto version = in.u32_le();
  if (version != kCheckpointVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  ModelShape shape;
  shape.input_channels = static_cast<int>(in.u32_le());
  shape.input_height = static_cast<int>(in.u32_le());
  shape.input_width = static_cast<int>(in.u32_le());
  shape.num_classes = static_cast<int>(in.u32_le());
  const auto layer_count = in.u32_le();
  if (layer_count < 2 || layer_count > 64) throw FormatError("checkpoint: implausible layer count");

  struct Block {
    std::uint32_t kind, inputs, outputs, kernel;
    std::vector<double> weights, biases;
  };
  std::vector<Block> blocks;
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    Block b;
    b.kind = in.u32_le();
    b.inputs = in.u32_le();
    b.outputs = in.u32_le();
    b.kernel = in.u32_le();
    const auto wc = in.u64_le();
    const auto bc = in.u64_le();
    if (wc > in.remaining() / 8 || bc > in.remaining() / 8) throw FormatError("checkpoint: truncated weights");
    b.weights.resize(static_cast<std::size_t>(wc));
    b.biases.resize(static_cast<std::size_t>(bc));
    for (auto& w : b.weights) w = in.f64_le();
    for (auto& w : b.biases) w = in.f64_le();
    blocks.push_back(std::move(b));
  }
  if (in.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  shape.conv_channels.clear();
  for (std::uint32_t l = 0; l + 1 < layer_count; ++l) {
    if (blocks[l].kind != kConvKind) throw FormatError("checkpoint: expected a conv layer");
    shape.conv_channels.push_back(static_cast<int>(blocks[l].outputs));
    shape.kernel = static_cast<int>(blocks[l].kernel);
  }
  if (blocks.back().kind != kDenseKind) throw FormatError("checkpoint: last layer must be dense");

  TinyCnn model = [&] {
    try {
      return TinyCnn(shape);
    } catch (const Error& e) {
      throw FormatError(std::string("checkpoint: ") + e.what());
    }
  }();
  auto params = model.parameters();
  auto fill = [&](const Block& b, std::uint32_t inputs, std::uint32_t outputs, std::uint32_t kernel,
                  std::size_t weight_offset, std::size_t bias_offset) {
    if (b.inputs != inputs || b.outputs != outputs || b.kernel != kernel) {
      throw FormatError("checkpoint: layer header inconsistent with the architecture");
    }
    if (b.biases.size() != outputs || bias_offset - weight_offset != b.weights.size()) {
      throw FormatError("checkpoint: weight count inconsistent with the layer shape");
    }
    for (std::size_t i = 0; i < b.weights.size(); ++i) params[weight_offset + i] = b.weights[i];
    for (std::size_t i = 0; i < b.biases.size(); ++i) params[bias_offset + i] = b.biases[i];
  };
  for (std::size_t l = 0; l < model.conv_layers().size(); ++l) {
    const auto& g = model.conv_layers()[l];
    if (static_cast<int>(blocks[l].kernel) != g.kernel) throw FormatError("checkpoint: mixed kernel sizes");
    fill(blocks[l], static_cast<std::uint32_t>(g.in_channels), static_cast<std::uint32_t>(g.out_channels),
         static_cast<std::uint32_t>(g.kernel), g.weight_offset, g.bias_offset);
  }
  const auto& d = model.dense();
  fill(blocks.back(), static_cast<std::uint32_t>(d.inputs), static_cast<std::uint32_t>(d.outputs), 1, d.weight_offset,
       d.bias_offset);
  for (double v : model.parameters()) {
    if (!std::isfinite(v)) throw FormatError("checkpoint: non-finite parameter");
  }
  return model;
}

void save_checkpoint(const TinyCnn& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(model));
}

TinyCnn load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace occlubench::refmodel
