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

#ifndef SEGFUSION_FUSION_HPP_
#define SEGFUSION_FUSION_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segfusion/core.hpp"
#include "segfusion/kmodes.hpp"

namespace segfusion {

struct FusionOptions {
  double confidence_threshold = 0.75;
  kmodes::InitMethod init_method = kmodes::InitMethod::vector_density;
  std::size_t max_iterations = 100;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k_override;

  void validate() const {
    if (!(confidence_threshold > 0.0 && confidence_threshold <= 1.0)) {
      throw InvalidArgument("confidence threshold must lie in (0, 1]");
    }
    if (max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
    if (k_override && *k_override == 0) throw InvalidArgument("cluster count must be positive");
  }

  kmodes::InitStrategy init() const { return {init_method, seed}; }
};

struct FusionResult {
  LabelMap consensus;
  ClusterModel model;
  std::size_t k_requested = 0;
  std::size_t k_used = 0;
  std::size_t distinct_vectors = 0;  // foreground only
  std::size_t masked_pixels = 0;
  std::vector<std::string> warnings;
};

// Offsets each member's labels so ID ranges never overlap across members.
// Background stays 0 in every map.
inline std::vector<FeatureMap> assign_global_ids(const SegmentationGroup& group) {
  std::vector<FeatureMap> maps;
  maps.reserve(group.size());
  Label offset = 0;
  for (const LabelMap& member : group.members) {
    std::vector<Label> ids(member.values().begin(), member.values().end());
    Label highest = 0;
    for (Label& v : ids) {
      highest = std::max(highest, v);
      if (v != kBackground) v += offset;
    }
    maps.emplace_back(member.width(), member.height(), std::move(ids));
    offset += highest;
  }
  return maps;
}

// C = (1/L) * sum_i B_i * p_i, where B_i marks pixels member i annotated.
inline ConfidenceMap compute_confidence_map(const SegmentationGroup& group) {
  group.validate();
  const std::size_t n = group.members.front().size();
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double p = group.confidences[i];
    const auto labels = group.members[i].values();
    for (std::size_t px = 0; px < n; ++px) {
      if (labels[px] != kBackground) c[px] += p;
    }
  }
  const double inv_l = 1.0 / static_cast<double>(group.size());
  for (double& v : c) v = std::clamp(v * inv_l, 0.0, 1.0);
  return ConfidenceMap(group.width(), group.height(), std::move(c));
}

inline Mask binarize_confidence_map(const ConfidenceMap& c, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("confidence threshold must lie in (0, 1]");
  }
  std::vector<std::uint8_t> mask(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) mask[i] = c[i] >= threshold ? 1 : 0;
  return Mask(c.width(), c.height(), std::move(mask));
}

// Sends every non-significant pixel to background in all maps.
inline std::vector<FeatureMap> mask_feature_maps(std::span<const FeatureMap> maps,
                                                 const Mask& mask) {
  std::vector<FeatureMap> out;
  out.reserve(maps.size());
  for (const FeatureMap& f : maps) {
    require_same_shape(f, mask, "feature map vs mask");
    std::vector<Label> v(f.values().begin(), f.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!mask[i]) v[i] = kBackground;
    }
    out.emplace_back(f.width(), f.height(), std::move(v));
  }
  return out;
}

// Stacks the maps into one L-vector per pixel and deduplicates. Distinct
// vectors come out in lexicographic order.
inline FeatureVectorSet build_feature_vectors(std::span<const FeatureMap> maps) {
  if (maps.empty()) throw InvalidArgument("need at least one feature map");
  for (const FeatureMap& f : maps) require_same_shape(maps.front(), f, "feature map");
  const std::size_t arity = maps.size();
  const std::size_t n = maps.front().size();

  std::vector<Label> stacked(n * arity);
  for (std::size_t j = 0; j < arity; ++j) {
    const auto v = maps[j].values();
    for (std::size_t px = 0; px < n; ++px) stacked[px * arity + j] = v[px];
  }
  auto row = [&](std::size_t px) {
    return std::span<const Label>(stacked.data() + px * arity, arity);
  };

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return kmodes::lex_less(row(a), row(b));
  });

  std::vector<Label> flat;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint32_t> origin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(order[i]);
    if (i == 0 || !std::equal(r.begin(), r.end(), row(order[i - 1]).begin())) {
      flat.insert(flat.end(), r.begin(), r.end());
      counts.push_back(0);
    }
    ++counts.back();
    origin[order[i]] = static_cast<std::uint32_t>(counts.size() - 1);
  }
  return FeatureVectorSet(maps.front().width(), maps.front().height(),
                          WeightedVectors(arity, std::move(flat), std::move(counts)),
                          std::move(origin));
}

// Mean region count over the members, rounded half up, at least 1.
inline std::size_t select_cluster_count(const SegmentationGroup& group) {
  if (group.members.empty()) throw InvalidArgument("segmentation group is empty");
  std::size_t total = 0;
  for (const LabelMap& m : group.members) total += region_count(m);
  const std::size_t l = group.size();
  return std::max<std::size_t>(1, (2 * total + l) / (2 * l));
}

// Full pipeline: global IDs, confidence mask, feature vectors, K-Modes,
// reshape. All-background vectors are decided up front as consensus label 0
// and take no part in clustering.
inline FusionResult fuse_detailed(const SegmentationGroup& input, const FusionOptions& options) {
  options.validate();
  input.validate();

  SegmentationGroup group = input;
  for (LabelMap& m : group.members) m = normalize_labels(m);

  const std::vector<FeatureMap> ids = assign_global_ids(group);
  const Mask mask =
      binarize_confidence_map(compute_confidence_map(group), options.confidence_threshold);
  const std::vector<FeatureMap> masked = mask_feature_maps(ids, mask);
  const FeatureVectorSet set = build_feature_vectors(masked);

  FusionResult result;
  result.masked_pixels =
      static_cast<std::size_t>(std::count(mask.values().begin(), mask.values().end(), 0));
  result.k_requested = options.k_override.value_or(select_cluster_count(group));

  // Split distinct vectors into pinned background and clusterable foreground.
  std::vector<std::int64_t> to_foreground(set.size(), -1);
  std::vector<Label> fg_flat;
  std::vector<std::uint64_t> fg_counts;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto v = set[i];
    if (std::all_of(v.begin(), v.end(), [](Label l) { return l == kBackground; })) continue;
    to_foreground[i] = static_cast<std::int64_t>(fg_counts.size());
    fg_flat.insert(fg_flat.end(), v.begin(), v.end());
    fg_counts.push_back(set.count(i));
  }
  result.distinct_vectors = fg_counts.size();

  std::vector<Label> out(set.origin_index().size(), kBackground);
  if (fg_counts.empty()) {
    result.warnings.push_back("no significant pixels; consensus is all background");
    result.consensus = LabelMap(set.width(), set.height(), std::move(out));
    return result;
  }

  result.k_used = result.k_requested;
  if (result.k_used > fg_counts.size()) {
    result.warnings.push_back("requested K=" + std::to_string(result.k_requested) +
                              " exceeds " + std::to_string(fg_counts.size()) +
                              " distinct foreground vectors; clamped");
    result.k_used = fg_counts.size();
  }

  const WeightedVectors foreground(set.arity(), std::move(fg_flat), std::move(fg_counts));
  result.model =
      kmodes::cluster(foreground, result.k_used, options.init(), options.max_iterations);
  if (!result.model.converged) {
    result.warnings.push_back("K-Modes stopped at max_iterations=" +
                              std::to_string(options.max_iterations) + " without converging");
  }

  const auto origin = set.origin_index();
  for (std::size_t px = 0; px < out.size(); ++px) {
    const std::int64_t fg = to_foreground[origin[px]];
    if (fg >= 0) out[px] = 1 + result.model.assignment[static_cast<std::size_t>(fg)];
  }
  result.consensus = normalize_labels(LabelMap(set.width(), set.height(), std::move(out)));
  return result;
}

inline LabelMap fuse(const SegmentationGroup& group, const FusionOptions& options = {}) {
  return fuse_detailed(group, options).consensus;
}

}  // namespace segfusion

#endif  // SEGFUSION_FUSION_HPP_
