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

// Minimal PNG reader for 8-bit RGB, non-interlaced, unfiltered rows.
// Verifies chunk CRCs.

#include <zlib.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace occlubench::testing {

struct DecodedPng {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  const std::uint8_t* pixel(int x, int y) const { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
};

inline std::uint32_t png_be32(const std::vector<std::uint8_t>& b, std::size_t at) {
  if (at + 4 > b.size()) throw std::runtime_error("png: truncated");
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

inline DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() < 8 || !std::equal(sig, sig + 8, bytes.begin())) throw std::runtime_error("png: bad signature");
  DecodedPng out;
  std::vector<std::uint8_t> idat;
  bool ended = false;
  std::size_t at = 8;
  while (!ended) {
    const std::uint32_t len = png_be32(bytes, at);
    if (at + 12 + len > bytes.size()) throw std::runtime_error("png: truncated chunk");
    const std::string type(bytes.begin() + static_cast<long>(at) + 4, bytes.begin() + static_cast<long>(at) + 8);
    const std::uint8_t* data = bytes.data() + at + 8;
    const uLong crc = crc32(0L, bytes.data() + at + 4, len + 4);
    if (crc != png_be32(bytes, at + 8 + len)) throw std::runtime_error("png: crc mismatch in " + type);
    if (type == "IHDR") {
      std::vector<std::uint8_t> h(data, data + len);
      out.width = static_cast<int>(png_be32(h, 0));
      out.height = static_cast<int>(png_be32(h, 4));
      if (h[8] != 8 || h[9] != 2 || h[12] != 0) throw std::runtime_error("png: unsupported format");
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      ended = true;
    }
    at += 12 + len;
  }
  const std::size_t stride = static_cast<std::size_t>(out.width) * 3 + 1;
  std::vector<std::uint8_t> raw(stride * out.height);
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, idat.data(), idat.size()) != Z_OK || raw_len != raw.size()) {
    throw std::runtime_error("png: bad image data");
  }
  out.rgb.reserve(raw.size());
  for (int y = 0; y < out.height; ++y) {
    if (raw[y * stride] != 0) throw std::runtime_error("png: filtered rows not supported");
    out.rgb.insert(out.rgb.end(), raw.begin() + static_cast<long>(y * stride + 1),
                   raw.begin() + static_cast<long>((y + 1) * stride));
  }
  return out;
}

}  // namespace occlubench::testing
