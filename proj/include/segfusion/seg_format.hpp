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

#ifndef SEGFUSION_SEG_FORMAT_HPP_
#define SEGFUSION_SEG_FORMAT_HPP_

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "segfusion/core.hpp"

// Berkeley segmentation (.seg) text format:
//
//   format ascii cr
//   width 481
//   height 321
//   segments 12
//   ...other "key value" lines...
//   data
//   <label> <row> <first col> <last col>     (one run per line, 0-based)
//
// Labels are 0-based in the file and shifted by +1 on load, since label 0 is
// background in memory.

namespace segfusion::seg {

enum class ParseErrorKind {
  missing_header,    // no "data" line
  garbled_header,    // malformed or missing width/height/segments
  garbled_run,       // data line is not four non-negative integers
  run_out_of_bounds,
  overlapping_runs,
  uncovered_pixels,
};

inline const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::missing_header: return "missing header";
    case ParseErrorKind::garbled_header: return "garbled header";
    case ParseErrorKind::garbled_run: return "garbled run";
    case ParseErrorKind::run_out_of_bounds: return "run out of bounds";
    case ParseErrorKind::overlapping_runs: return "overlapping runs";
    case ParseErrorKind::uncovered_pixels: return "uncovered pixels";
  }
  return "parse error";
}

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
      : Error("seg line " + std::to_string(line) + ": " + to_string(kind) + ": " + detail),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  // 1-based line number the error refers to.
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

struct SegFileHeader {
  std::string format = "ascii cr";
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t segments = 0;
  // Every other header line, in file order (date, image, user, gray, ...).
  std::vector<std::pair<std::string, std::string>> extras;
};

struct SegFile {
  SegFileHeader header;
  LabelMap map;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Splits "s r c1 c2" into exactly four unsigned integers.
inline bool parse_run(std::string_view line, std::uint64_t (&v)[4]) {
  std::size_t n = 0;
  line = trim(line);
  while (!line.empty()) {
    if (n == 4) return false;
    std::size_t end = 0;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (!parse_uint(line.substr(0, end), v[n++])) return false;
    line = trim(line.substr(end));
  }
  return n == 4;
}

}  // namespace detail

inline SegFile parse_seg_file(std::string_view bytes) {
  using detail::trim;
  const auto lines = detail::split_lines(bytes);

  SegFile out;
  bool have_width = false, have_height = false, have_segments = false;
  std::size_t line_no = 0;
  std::size_t data_line = 0;
  for (; line_no < lines.size(); ++line_no) {
    const std::string_view line = trim(lines[line_no]);
    if (line.empty()) continue;
    if (line == "data") {
      data_line = line_no + 1;
      break;
    }
    std::size_t sep = 0;
    while (sep < line.size() && !detail::is_space(line[sep])) ++sep;
    const std::string_view key = line.substr(0, sep);
    const std::string_view value = trim(line.substr(sep));
    auto number = [&](std::size_t& field, bool& seen) {
      if (!detail::parse_uint(value, field) || field == 0) {
        throw ParseError(ParseErrorKind::garbled_header, line_no + 1,
                         "bad value for '" + std::string(key) + "'");
      }
      seen = true;
    };
    if (key == "width") {
      number(out.header.width, have_width);
    } else if (key == "height") {
      number(out.header.height, have_height);
    } else if (key == "segments") {
      number(out.header.segments, have_segments);
    } else if (key == "format") {
      out.header.format = std::string(value);
    } else {
      out.header.extras.emplace_back(std::string(key), std::string(value));
    }
  }
  if (data_line == 0) {
    throw ParseError(ParseErrorKind::missing_header, lines.size() + 1, "no 'data' line");
  }
  if (!have_width || !have_height || !have_segments) {
    throw ParseError(ParseErrorKind::garbled_header, data_line,
                     "header lacks width, height or segments");
  }

  const std::size_t w = out.header.width, h = out.header.height;
  std::vector<Label> labels(w * h, kBackground);
  std::vector<std::uint8_t> covered(w * h, 0);
  std::size_t covered_count = 0;
  for (line_no = data_line; line_no < lines.size(); ++line_no) {
    const std::string_view line = trim(lines[line_no]);
    if (line.empty()) continue;
    std::uint64_t v[4];
    if (!detail::parse_run(line, v)) {
      throw ParseError(ParseErrorKind::garbled_run, line_no + 1,
                       "expected 'label row first last', got '" + std::string(line) + "'");
    }
    const auto [s, r, c1, c2] = v;
    if (r >= h || c1 > c2 || c2 >= w || s >= 0xFFFFFFFFull) {
      throw ParseError(ParseErrorKind::run_out_of_bounds, line_no + 1,
                       "run '" + std::string(line) + "' outside " + std::to_string(w) + "x" +
                           std::to_string(h));
    }
    for (std::uint64_t c = c1; c <= c2; ++c) {
      const std::size_t i = r * w + c;
      if (covered[i]) {
        throw ParseError(ParseErrorKind::overlapping_runs, line_no + 1,
                         "pixel (row " + std::to_string(r) + ", col " + std::to_string(c) +
                             ") already assigned");
      }
      covered[i] = 1;
      labels[i] = static_cast<Label>(s + 1);
    }
    covered_count += c2 - c1 + 1;
  }
  if (covered_count != w * h) {
    std::size_t first = 0;
    while (covered[first]) ++first;
    throw ParseError(ParseErrorKind::uncovered_pixels, lines.size(),
                     std::to_string(w * h - covered_count) + " pixels uncovered, first at (row " +
                         std::to_string(first / w) + ", col " + std::to_string(first % w) + ")");
  }
  out.map = LabelMap(w, h, std::move(labels));
  return out;
}

inline LabelMap parse_seg(std::string_view bytes) { return parse_seg_file(bytes).map; }

// Serializes a background-free map as maximal row-major runs. Extras whose key
// collides with a structural field are dropped. Header order follows the
// benchmark files: date, image and user ahead of the dimensions, the rest after.
inline std::string write_seg(const LabelMap& map,
                             const std::vector<std::pair<std::string, std::string>>& extras = {}) {
  for (Label l : map.values()) {
    if (l == kBackground) throw InvalidArgument(".seg output cannot represent background pixels");
  }
  if (map.empty()) throw InvalidArgument(".seg output needs a non-empty map");
  const LabelMap m = normalize_labels(map);

  auto leading = [](const std::string& k) { return k == "date" || k == "image" || k == "user"; };
  auto emit = [&](std::string& out, bool lead) {
    for (const auto& [key, value] : extras) {
      if (key == "format" || key == "width" || key == "height" || key == "segments" ||
          key == "data" || key.empty() || leading(key) != lead) {
        continue;
      }
      out += key + " " + value + "\n";
    }
  };
  std::string out = "format ascii cr\n";
  emit(out, true);
  out += "width " + std::to_string(m.width()) + "\n";
  out += "height " + std::to_string(m.height()) + "\n";
  out += "segments " + std::to_string(region_count(m)) + "\n";
  emit(out, false);
  out += "data\n";
  const std::size_t w = m.width();
  for (std::size_t r = 0; r < m.height(); ++r) {
    std::size_t c = 0;
    while (c < w) {
      const Label l = m[r * w + c];
      std::size_t end = c;
      while (end + 1 < w && m[r * w + end + 1] == l) ++end;
      out += std::to_string(l - 1) + " " + std::to_string(r) + " " + std::to_string(c) + " " +
             std::to_string(end) + "\n";
      c = end + 1;
    }
  }
  return out;
}

}  // namespace segfusion::seg

#endif  // SEGFUSION_SEG_FORMAT_HPP_
