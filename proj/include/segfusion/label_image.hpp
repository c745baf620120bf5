/* Copyright 2026 The segfusion Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SEGFUSION_LABEL_IMAGE_HPP_
#define SEGFUSION_LABEL_IMAGE_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "segfusion/core.hpp"

// Label maps as lossless single-channel PGM rasters (pixel value = label).
// 8-bit (maxval 255) and 16-bit big-endian (maxval 65535) binary P5 are
// written; P5 and ASCII P2 are read. Colour (P3/P6) and bitmap (P1/P4)
// inputs are rejected since they do not carry labels.

namespace segfusion::image {

class FormatError : public Error {
 public:
  using Error::Error;
};

enum class BitDepth { eight = 8, sixteen = 16 };

inline BitDepth minimal_depth(const LabelMap& map) {
  const auto v = map.values();
  const Label top = v.empty() ? 0 : *std::max_element(v.begin(), v.end());
  return top > 255 ? BitDepth::sixteen : BitDepth::eight;
}

inline std::string write_label_image(const LabelMap& map, BitDepth depth = BitDepth::eight) {
  const Label maxval = depth == BitDepth::eight ? 255 : 65535;
  for (Label l : map.values()) {
    if (l > maxval) {
      throw InvalidArgument("label " + std::to_string(l) + " does not fit an " +
                            std::to_string(static_cast<int>(depth)) +
                            "-bit raster; write it as 16-bit");
    }
  }
  std::string out = "P5\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) +
                    "\n" + std::to_string(maxval) + "\n";
  out.reserve(out.size() + map.size() * (depth == BitDepth::eight ? 1 : 2));
  for (Label l : map.values()) {
    if (depth == BitDepth::sixteen) out.push_back(static_cast<char>((l >> 8) & 0xFF));
    out.push_back(static_cast<char>(l & 0xFF));
  }
  return out;
}

namespace detail {

class Cursor {
 public:
  explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

  // Next whitespace-delimited header token, skipping '#' comments.
  std::string_view token() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    return bytes_.substr(start, pos_ - start);
  }

  std::uint64_t number(const char* what) {
    const std::string_view t = token();
    std::uint64_t v = 0;
    if (t.empty()) throw FormatError(std::string("raster truncated before ") + what);
    for (char c : t) {
      if (c < '0' || c > '9') throw FormatError(std::string("bad raster ") + what);
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
      if (v > 0xFFFFFFFFull) throw FormatError(std::string("raster ") + what + " too large");
    }
    return v;
  }

  // Binary payload begins after exactly one whitespace byte.
  std::string_view payload() {
    if (pos_ < bytes_.size()) ++pos_;
    return bytes_.substr(pos_);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline LabelMap read_label_image(std::string_view bytes) {
  detail::Cursor cur(bytes);
  const std::string_view magic = cur.token();
  if (magic == "P3" || magic == "P6") {
    throw FormatError("multi-channel raster cannot be read as a label map");
  }
  if (magic == "P1" || magic == "P4") throw FormatError("bitmap raster has no label values");
  if (magic != "P5" && magic != "P2") throw FormatError("not a PGM label raster");

  const std::size_t w = cur.number("width");
  const std::size_t h = cur.number("height");
  const std::uint64_t maxval = cur.number("maxval");
  if (w == 0 || h == 0) throw FormatError("raster has zero size");
  if (maxval == 0 || maxval > 65535) throw FormatError("raster maxval out of range");

  std::vector<Label> labels(w * h);
  if (magic == "P2") {
    for (Label& l : labels) {
      const std::uint64_t v = cur.number("pixel");
      if (v > maxval) throw FormatError("pixel exceeds maxval");
      l = static_cast<Label>(v);
    }
  } else {
    const std::string_view data = cur.payload();
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (data.size() < labels.size() * bpp) throw FormatError("raster payload truncated");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto hi = static_cast<unsigned char>(data[i * bpp]);
      labels[i] = bpp == 1 ? hi
                           : static_cast<Label>((hi << 8) |
                                                static_cast<unsigned char>(data[i * bpp + 1]));
      if (labels[i] > maxval) throw FormatError("pixel exceeds maxval");
    }
  }
  return LabelMap(w, h, std::move(labels));
}

// Colour render for viewing (binary PPM). The palette depends only on the
// seed; background is black.
inline std::string render_label_image(const LabelMap& map, std::uint64_t seed = 0x5eedf05e) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> palette;
  const auto v = map.values();
  const Label top = v.empty() ? 0 : *std::max_element(v.begin(), v.end());
  palette.resize(3 * (static_cast<std::size_t>(top) + 1), 0);
  std::uniform_int_distribution<int> channel(40, 255);
  for (std::size_t l = 1; l <= top; ++l) {
    for (int c = 0; c < 3; ++c) palette[3 * l + c] = static_cast<std::uint8_t>(channel(rng));
  }
  std::string out = "P6\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) +
                    "\n255\n";
  for (Label l : v) {
    for (int c = 0; c < 3; ++c) out.push_back(static_cast<char>(palette[3 * l + c]));
  }
  return out;
}

}  // namespace segfusion::image

#endif  // SEGFUSION_LABEL_IMAGE_HPP_
