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

#include "occlubench/dataio/interchange.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "occlubench/core/atomic_file.hpp"
#include "occlubench/core/bytes.hpp"
#include "occlubench/core/error.hpp"

namespace occlubench::dataio {

std::string encode_prediction_log(PredictionLog log) {
  sort_log(log);
  std::string out;
  for (const auto& r : log) {
    out += "{\"split\":\"";
    out += to_string(r.split);
    out += "\",\"index\":" + std::to_string(r.index) + ",\"true_label\":" + std::to_string(r.true_label) +
           ",\"predicted_label\":" + std::to_string(r.predicted_label) + "}\n";
  }
  return out;
}

PredictionLog parse_prediction_log(std::string_view text) {
  PredictionLog log;
  std::set<std::pair<Split, std::int64_t>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string where = "prediction log line " + std::to_string(line_no) + ": ";
    if (line.empty()) throw FormatError(where + "empty line");
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw FormatError(where + "not a JSON object");
    for (const char* key : {"split", "index", "true_label", "predicted_label"}) {
      if (!obj.contains(key)) throw FormatError(where + "missing field '" + key + "'");
    }
    if (obj.size() != 4) throw FormatError(where + "unexpected extra fields");
    if (!obj["split"].is_string()) throw FormatError(where + "'split' must be a string");
    for (const char* key : {"index", "true_label", "predicted_label"}) {
      if (!obj[key].is_number_integer() || obj[key].get<std::int64_t>() < 0) {
        throw FormatError(where + "'" + key + "' must be a non-negative integer");
      }
    }
    PredictionRecord rec;
    try {
      rec.split = parse_split(obj["split"].get<std::string>());
    } catch (const FormatError& e) {
      throw FormatError(where + e.what());
    }
    rec.index = obj["index"].get<std::int64_t>();
    const auto t = obj["true_label"].get<std::int64_t>();
    const auto p = obj["predicted_label"].get<std::int64_t>();
    if (t > std::numeric_limits<int>::max() || p > std::numeric_limits<int>::max()) {
      throw FormatError(where + "label too large");
    }
    rec.true_label = static_cast<int>(t);
    rec.predicted_label = static_cast<int>(p);
    if (!seen.emplace(rec.split, rec.index).second) {
      throw FormatError(where + "duplicate record for (" + std::string(to_string(rec.split)) + ", " +
                        std::to_string(rec.index) + ")");
    }
    log.push_back(rec);
  }
  sort_log(log);
  return log;
}

void write_prediction_log(const std::filesystem::path& path, const PredictionLog& log) {
  write_file_atomic(path, encode_prediction_log(log));
}

PredictionLog read_prediction_log(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return parse_prediction_log(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void check_log_labels(const PredictionLog& log, int num_classes) {
  for (const auto& r : log) {
    if (r.true_label >= num_classes || r.predicted_label >= num_classes) {
      throw FormatError("record (" + std::string(to_string(r.split)) + ", " + std::to_string(r.index) +
                        ") has a label outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

std::vector<std::uint8_t> encode_saliency(std::span<const SaliencyMap> maps) {
  ByteWriter out;
  out.put_magic("OBSM");
  const int h = maps.empty() ? 0 : maps[0].height;
  const int w = maps.empty() ? 0 : maps[0].width;
  out.put_u32(static_cast<std::uint32_t>(maps.size()));
  out.put_u32(static_cast<std::uint32_t>(h));
  out.put_u32(static_cast<std::uint32_t>(w));
  for (const auto& m : maps) {
    if (m.height != h || m.width != w || m.values.size() != static_cast<std::size_t>(h) * w) {
      throw ShapeError("saliency maps in one file must share a shape");
    }
    for (float v : m.values) out.put_f32(v);
  }
  return out.take();
}

std::vector<SaliencyMap> parse_saliency(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes, "saliency file");
  in.expect_magic("OBSM");
  const std::uint64_t count = in.u32_le();
  const std::uint64_t h = in.u32_le();
  const std::uint64_t w = in.u32_le();
  if (count * h * w * 4 != in.remaining()) {
    throw FormatError("saliency file: header declares " + std::to_string(count) + " maps of " + std::to_string(h) +
                      "x" + std::to_string(w) + " (" + std::to_string(count * h * w * 4) + " bytes) but " +
                      std::to_string(in.remaining()) + " bytes follow");
  }
  std::vector<SaliencyMap> maps(static_cast<std::size_t>(count));
  for (std::size_t m = 0; m < maps.size(); ++m) {
    maps[m].height = static_cast<int>(h);
    maps[m].width = static_cast<int>(w);
    maps[m].values.resize(static_cast<std::size_t>(h * w));
    for (auto& v : maps[m].values) {
      v = in.f32_le();
      if (!std::isfinite(v)) throw FormatError("saliency file: map " + std::to_string(m) + " has a non-finite value");
      if (v < 0.0f) throw FormatError("saliency file: map " + std::to_string(m) + " has a negative value");
    }
  }
  return maps;
}

void write_saliency(const std::filesystem::path& path, std::span<const SaliencyMap> maps) {
  write_file_atomic(path, encode_saliency(maps));
}

std::vector<SaliencyMap> read_saliency(const std::filesystem::path& path) { return parse_saliency(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_masks(std::span<const Mask> masks) {
  ByteWriter out;
  out.put_magic("OBMK");
  const int h = masks.empty() ? 0 : masks[0].height();
  const int w = masks.empty() ? 0 : masks[0].width();
  out.put_u32(static_cast<std::uint32_t>(masks.size()));
  out.put_u32(static_cast<std::uint32_t>(h));
  out.put_u32(static_cast<std::uint32_t>(w));
  for (const auto& m : masks) {
    if (m.height() != h || m.width() != w) throw ShapeError("masks in one file must share a shape");
    out.put_bytes(m.covered());
  }
  return out.take();
}

std::vector<Mask> parse_masks(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes, "mask file");
  in.expect_magic("OBMK");
  const std::uint64_t count = in.u32_le();
  const std::uint64_t h = in.u32_le();
  const std::uint64_t w = in.u32_le();
  if (count * h * w != in.remaining()) throw FormatError("mask file: payload length does not match the header");
  std::vector<Mask> masks;
  masks.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t m = 0; m < count; ++m) {
    auto raw = in.take(static_cast<std::size_t>(h * w));
    std::vector<std::uint8_t> cells(raw.begin(), raw.end());
    for (auto c : cells) {
      if (c > 1) throw FormatError("mask file: mask " + std::to_string(m) + " has a cell other than 0/1");
    }
    masks.emplace_back(static_cast<int>(h), static_cast<int>(w), std::move(cells));
  }
  return masks;
}

void write_masks(const std::filesystem::path& path, std::span<const Mask> masks) {
  write_file_atomic(path, encode_masks(masks));
}

std::vector<Mask> read_masks(const std::filesystem::path& path) { return parse_masks(read_file_bytes(path)); }

std::string encode_subset(const SubsetIndex& subset) {
  std::string out = "split=" + std::string(to_string(subset.split)) + "\n";
  for (auto i : subset.indices) out += std::to_string(i) + "\n";
  return out;
}

SubsetIndex parse_subset(std::string_view text) {
  SubsetIndex subset;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header) {
      if (line.substr(0, 6) != "split=") throw FormatError("subset file: first line must be split=<train|test>");
      subset.split = parse_split(line.substr(6));
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr != line.data() + line.size() || value < 0) {
      throw FormatError("subset file line " + std::to_string(line_no) + ": not a non-negative integer");
    }
    if (!subset.indices.empty() && value <= subset.indices.back()) {
      throw FormatError("subset file line " + std::to_string(line_no) + ": indices must be sorted and unique");
    }
    subset.indices.push_back(value);
  }
  if (!header) throw FormatError("subset file: missing split header");
  return subset;
}

SubsetIndex read_subset(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_subset(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_subset(const std::filesystem::path& path, const SubsetIndex& subset) {
  write_file_atomic(path, encode_subset(subset));
}

}  // namespace occlubench::dataio
