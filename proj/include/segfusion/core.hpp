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

#ifndef SEGFUSION_CORE_HPP_
#define SEGFUSION_CORE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace segfusion {

using Label = std::uint32_t;

// Reserved "no annotation" label. Human annotations start at 1.
inline constexpr Label kBackground = 0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void throw_shape(const char* what, std::size_t w1, std::size_t h1,
                                     std::size_t w2, std::size_t h2) {
  throw DimensionMismatch(std::string(what) + ": " + std::to_string(w1) + "x" +
                          std::to_string(h1) + " vs " + std::to_string(w2) + "x" +
                          std::to_string(h2));
}

}  // namespace detail

// Row-major 2-D grid. The tag keeps label maps, feature maps and masks from
// being mixed up even though several share an element type.
template <typename T, typename Tag>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), values_(width * height, fill) {}

  Grid(std::size_t width, std::size_t height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != width_ * height_) {
      throw InvalidArgument("grid of " + std::to_string(width_) + "x" +
                            std::to_string(height_) + " given " +
                            std::to_string(values_.size()) + " values");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const T> values() const noexcept { return values_; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  const T& at(std::size_t x, std::size_t y) const { return values_.at(y * width_ + x); }

  template <typename OtherT, typename OtherTag>
  bool same_shape(const Grid<OtherT, OtherTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> values_;
};

struct LabelMapTag {};
struct FeatureMapTag {};
struct ConfidenceMapTag {};
struct MaskTag {};
struct BoundaryMapTag {};

// One segmentation. Region identity is label equality, not connectivity.
using LabelMap = Grid<Label, LabelMapTag>;

// A segmentation re-expressed with globally unique region IDs.
using FeatureMap = Grid<Label, FeatureMapTag>;

// Per-pixel confidence in [0, 1].
using ConfidenceMap = Grid<double, ConfidenceMapTag>;

// Binarized confidence map: 1 where the pixel is significant.
using Mask = Grid<std::uint8_t, MaskTag>;

using BoundaryMap = Grid<std::uint8_t, BoundaryMapTag>;

template <typename T, typename Tag, typename U, typename UTag>
void require_same_shape(const Grid<T, Tag>& a, const Grid<U, UTag>& b, const char* what) {
  if (!a.same_shape(b)) detail::throw_shape(what, a.width(), a.height(), b.width(), b.height());
}

// Relabels non-zero labels to 1..J in order of first (row-major) occurrence.
inline LabelMap normalize_labels(const LabelMap& map) {
  std::unordered_map<Label, Label> remap;
  std::vector<Label> out(map.size());
  Label next = 1;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const Label l = map[i];
    if (l == kBackground) {
      out[i] = kBackground;
      continue;
    }
    auto [it, inserted] = remap.try_emplace(l, next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return LabelMap(map.width(), map.height(), std::move(out));
}

// Number of distinct non-zero labels.
inline std::size_t region_count(const LabelMap& map) {
  std::vector<Label> seen(map.values().begin(), map.values().end());
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return seen.size() - (!seen.empty() && seen.front() == kBackground ? 1 : 0);
}

// True when both maps induce the same partition of the pixels, with the
// background label required to coincide exactly.
inline bool partition_equal(const LabelMap& a, const LabelMap& b) {
  return a.same_shape(b) && normalize_labels(a) == normalize_labels(b);
}

struct SegmentationGroup {
  std::string image_id;
  std::vector<LabelMap> members;
  std::vector<double> confidences;  // one p_i per member

  std::size_t size() const noexcept { return members.size(); }
  std::size_t width() const { return members.front().width(); }
  std::size_t height() const { return members.front().height(); }

  // Throws unless the group is non-empty, same-sized and has unit confidences.
  void validate() const {
    if (members.empty()) throw InvalidArgument("segmentation group '" + image_id + "' is empty");
    if (confidences.size() != members.size()) {
      throw InvalidArgument("segmentation group '" + image_id + "' has " +
                            std::to_string(members.size()) + " members but " +
                            std::to_string(confidences.size()) + " confidences");
    }
    for (const LabelMap& m : members) require_same_shape(members.front(), m, "group member");
    for (double p : confidences) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("confidence " + std::to_string(p) + " outside [0, 1]");
      }
    }
  }

  static SegmentationGroup uniform(std::string id, std::vector<LabelMap> members) {
    SegmentationGroup g{std::move(id), std::move(members), {}};
    g.confidences.assign(g.members.size(), 1.0);
    return g;
  }
};

// Distinct categorical vectors with multiplicities, stored flat.
class WeightedVectors {
 public:
  WeightedVectors() = default;

  WeightedVectors(std::size_t arity, std::vector<Label> flat, std::vector<std::uint64_t> counts)
      : arity_(arity), flat_(std::move(flat)), counts_(std::move(counts)) {
    if (arity_ == 0) throw InvalidArgument("vector arity must be positive");
    if (flat_.size() != arity_ * counts_.size()) {
      throw InvalidArgument("flat vector storage does not match arity x count");
    }
    for (std::uint64_t c : counts_) {
      if (c == 0) throw InvalidArgument("vector multiplicity must be at least 1");
    }
  }

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::span<const Label> operator[](std::size_t i) const {
    return {flat_.data() + i * arity_, arity_};
  }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  std::uint64_t total() const noexcept {
    std::uint64_t n = 0;
    for (std::uint64_t c : counts_) n += c;
    return n;
  }

  friend bool operator==(const WeightedVectors&, const WeightedVectors&) = default;

 private:
  std::size_t arity_ = 0;
  std::vector<Label> flat_;
  std::vector<std::uint64_t> counts_;
};

// The set X: one categorical vector per pixel, deduplicated. origin_index maps
// each pixel back to its distinct vector so partitions can be reshaped.
class FeatureVectorSet {
 public:
  FeatureVectorSet() = default;

  FeatureVectorSet(std::size_t width, std::size_t height, WeightedVectors vectors,
                   std::vector<std::uint32_t> origin_index)
      : width_(width), height_(height), vectors_(std::move(vectors)),
        origin_(std::move(origin_index)) {
    if (origin_.size() != width_ * height_) {
      throw InvalidArgument("origin index must cover every pixel");
    }
    std::vector<std::uint64_t> seen(vectors_.size(), 0);
    for (std::uint32_t o : origin_) {
      if (o >= vectors_.size()) throw InvalidArgument("origin index out of range");
      ++seen[o];
    }
    if (!std::equal(seen.begin(), seen.end(), vectors_.counts().begin())) {
      throw InvalidArgument("vector multiplicities disagree with origin index");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t arity() const noexcept { return vectors_.arity(); }
  std::size_t size() const noexcept { return vectors_.size(); }
  std::span<const Label> operator[](std::size_t i) const { return vectors_[i]; }
  std::uint64_t count(std::size_t i) const { return vectors_.count(i); }
  const WeightedVectors& vectors() const noexcept { return vectors_; }
  std::span<const std::uint32_t> origin_index() const noexcept { return origin_; }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  WeightedVectors vectors_;
  std::vector<std::uint32_t> origin_;
};

using Mode = std::vector<Label>;

// Result of K-Modes: modes, the partition of the distinct vectors, and the
// multiplicity-weighted simple-matching cost after every assignment step.
struct ClusterModel {
  std::vector<Mode> modes;
  std::vector<std::uint32_t> assignment;
  std::size_t iterations = 0;
  std::uint64_t cost = 0;
  std::vector<std::uint64_t> cost_history;
  bool converged = false;

  std::size_t k() const noexcept { return modes.size(); }
};

struct ImageScores {
  double gce = 0.0;
  double voi = 0.0;
  double pri = 0.0;
  double bde = 0.0;
  double covering = 0.0;
};

struct ImageRecord {
  std::string image_id;
  ImageScores scores;
  std::size_t members = 0;
  std::vector<std::size_t> member_regions;
  std::size_t k_requested = 0;
  std::size_t k_used = 0;
  std::size_t consensus_regions = 0;
  std::size_t iterations = 0;
  std::uint64_t cost = 0;
  bool converged = true;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
  double elapsed_ms = 0.0;
};

struct MetricReport {
  std::vector<ImageRecord> records;  // in image-id order
  ImageScores means;                 // over records without error
  std::size_t failures = 0;
};

}  // namespace segfusion

#endif  // SEGFUSION_CORE_HPP_
