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

#ifndef SEGFUSION_DATASET_HPP_
#define SEGFUSION_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "segfusion/core.hpp"
#include "segfusion/label_image.hpp"
#include "segfusion/seg_format.hpp"

// Dataset layout:
//
//   <root>/<image id>/<member>.seg | <member>.pgm
//   <root>/<image id>/confidences.txt        (optional)
//
// The sidecar holds "filename confidence" lines; '#' starts a comment.
// Members without an entry, or groups without a sidecar, get confidence 1.0.

namespace segfusion::dataset {

namespace fs = std::filesystem;

inline constexpr std::string_view kSidecarName = "confidences.txt";

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

inline bool is_label_file(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".seg" || ext == ".pgm";
}

// Reads a .seg or .pgm file into a label map (not normalized).
inline LabelMap load_label_file(const fs::path& path) {
  const std::string bytes = read_file(path);
  try {
    if (path.extension() == ".seg") return seg::parse_seg(bytes);
    if (path.extension() == ".pgm") return image::read_label_image(bytes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  throw Error(path.string() + ": unsupported label file extension");
}

// Writes by extension: .seg, or .pgm at the smallest bit depth that fits.
inline void save_label_file(const fs::path& path, const LabelMap& map) {
  if (path.extension() == ".seg") {
    write_file(path, seg::write_seg(map));
  } else if (path.extension() == ".pgm") {
    write_file(path, image::write_label_image(map, image::minimal_depth(map)));
  } else {
    throw Error(path.string() + ": unsupported label file extension");
  }
}

inline std::vector<fs::path> member_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_label_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

// filename -> confidence
inline std::map<std::string, double> parse_sidecar(std::string_view text) {
  std::map<std::string, double> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name, value, rest;
    if (!(fields >> name)) continue;
    if (!(fields >> value) || (fields >> rest)) {
      throw Error("confidence sidecar line " + std::to_string(line_no) +
                  ": expected 'filename confidence'");
    }
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw Error("confidence sidecar line " + std::to_string(line_no) + ": bad number '" +
                  value + "'");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error("confidence sidecar line " + std::to_string(line_no) + ": confidence " + value +
                  " outside [0, 1]");
    }
    out[name] = p;
  }
  return out;
}

// Loads every member file in a group directory, sorted by filename, normalized.
inline SegmentationGroup load_group_dir(const fs::path& dir, std::string image_id = {}) {
  if (image_id.empty()) image_id = dir.filename().string();
  const std::vector<fs::path> files = member_files(dir);
  if (files.empty()) throw Error(dir.string() + " holds no .seg or .pgm members");

  std::map<std::string, double> sidecar;
  if (const fs::path side = dir / kSidecarName; fs::exists(side)) {
    try {
      sidecar = parse_sidecar(read_file(side));
    } catch (const Error& e) {
      throw Error(side.string() + ": " + e.what());
    }
  }

  SegmentationGroup g;
  g.image_id = std::move(image_id);
  for (const fs::path& f : files) {
    g.members.push_back(normalize_labels(load_label_file(f)));
    const auto it = sidecar.find(f.filename().string());
    g.confidences.push_back(it == sidecar.end() ? 1.0 : it->second);
    if (it != sidecar.end()) sidecar.erase(it);
  }
  if (!sidecar.empty()) {
    throw Error((dir / kSidecarName).string() + " names missing member '" +
                sidecar.begin()->first + "'");
  }
  for (std::size_t i = 1; i < g.members.size(); ++i) {
    if (!g.members[i].same_shape(g.members[0])) {
      throw DimensionMismatch(files[i].string() + " is " + std::to_string(g.members[i].width()) +
                              "x" + std::to_string(g.members[i].height()) + " but " +
                              files[0].filename().string() + " is " +
                              std::to_string(g.members[0].width()) + "x" +
                              std::to_string(g.members[0].height()));
    }
  }
  return g;
}

inline SegmentationGroup load_group(const fs::path& root, const std::string& image_id) {
  return load_group_dir(root / image_id, image_id);
}

// Image ids under a dataset root (subdirectory names), sorted.
inline std::vector<std::string> list_image_ids(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(root.string() + " is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace segfusion::dataset

#endif  // SEGFUSION_DATASET_HPP_
