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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "segfusion/fusion.hpp"
#include "support/generators.hpp"

namespace segfusion {
namespace {

template <typename GridT = LabelMap>
GridT row(std::vector<typename GridT::value_type> v) {
  const std::size_t n = v.size();
  return GridT(n, 1, std::move(v));
}

LabelMap counting(std::size_t regions) {
  std::vector<Label> v(regions);
  for (std::size_t i = 0; i < regions; ++i) v[i] = static_cast<Label>(i + 1);
  return LabelMap(regions, 1, std::move(v));
}

std::vector<Label> vec(std::span<const Label> s) { return {s.begin(), s.end()}; }

TEST(AssignGlobalIds, OffsetsAreCumulative) {
  const auto group = SegmentationGroup::uniform("g", {row({1, 1, 2, 2}), row({1, 2, 1, 2})});
  const auto maps = assign_global_ids(group);
  ASSERT_EQ(maps.size(), 2u);
  EXPECT_EQ(maps[0], row<FeatureMap>({1, 1, 2, 2}));
  EXPECT_EQ(maps[1], row<FeatureMap>({3, 4, 3, 4}));
}

TEST(AssignGlobalIds, SingleMemberUnchanged) {
  const auto maps = assign_global_ids(SegmentationGroup::uniform("g", {row({1, 2})}));
  EXPECT_EQ(maps[0], row<FeatureMap>({1, 2}));
}

TEST(AssignGlobalIds, BackgroundIsNotOffset) {
  const auto maps =
      assign_global_ids(SegmentationGroup::uniform("g", {row({0, 1}), row({0, 1})}));
  EXPECT_EQ(maps[0], row<FeatureMap>({0, 1}));
  EXPECT_EQ(maps[1], row<FeatureMap>({0, 2}));
}

TEST(ConfidenceMap, WeightedMeanOfAnnotatedMembers) {
  SegmentationGroup g = SegmentationGroup::uniform("g", {row({1, 2, 2}), row({1, 1, 1})});
  g.confidences = {1.0, 0.5};
  const ConfidenceMap c = compute_confidence_map(g);
  for (double v : c.values()) EXPECT_DOUBLE_EQ(v, 0.75);
}

TEST(ConfidenceMap, SingleFullAnnotationIsOne) {
  const ConfidenceMap c = compute_confidence_map(SegmentationGroup::uniform("g", {row({1, 2})}));
  for (double v : c.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(ConfidenceMap, PartialAnnotationHalves) {
  const ConfidenceMap c =
      compute_confidence_map(SegmentationGroup::uniform("g", {row({1, 1}), row({0, 1})}));
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 1.0);
}

TEST(BinarizeConfidenceMap, ClosedComparison) {
  const Mask at = binarize_confidence_map(row<ConfidenceMap>({0.75, 0.75}), 0.75);
  EXPECT_EQ(at, row<Mask>({1, 1}));
  EXPECT_EQ(binarize_confidence_map(row<ConfidenceMap>({1.0, 1.0}), 0.75), row<Mask>({1, 1}));
  EXPECT_EQ(binarize_confidence_map(row<ConfidenceMap>({0.5, 0.5}), 0.75), row<Mask>({0, 0}));
}

TEST(BinarizeConfidenceMap, ThresholdOutsideRangeThrows) {
  EXPECT_THROW(binarize_confidence_map(row<ConfidenceMap>({0.5}), 0.0), InvalidArgument);
  EXPECT_THROW(binarize_confidence_map(row<ConfidenceMap>({0.5}), 1.01), InvalidArgument);
}

TEST(MaskFeatureMaps, Pointwise) {
  const std::vector<FeatureMap> maps{row<FeatureMap>({1, 2, 3, 4})};
  EXPECT_EQ(mask_feature_maps(maps, row<Mask>({1, 1, 1, 1}))[0], maps[0]);
  EXPECT_EQ(mask_feature_maps(maps, row<Mask>({0, 0, 0, 0}))[0], row<FeatureMap>({0, 0, 0, 0}));
  EXPECT_EQ(mask_feature_maps(maps, row<Mask>({1, 0, 1, 0}))[0], row<FeatureMap>({1, 0, 3, 0}));
  EXPECT_THROW(mask_feature_maps(maps, row<Mask>({1, 0})), DimensionMismatch);
}

TEST(BuildFeatureVectors, DistinctIntersections) {
  const std::vector<FeatureMap> maps{row<FeatureMap>({1, 1, 2, 2}), row<FeatureMap>({3, 4, 3, 4})};
  const FeatureVectorSet set = build_feature_vectors(maps);
  ASSERT_EQ(set.size(), 4u);
  EXPECT_EQ(vec(set[0]), (std::vector<Label>{1, 3}));
  EXPECT_EQ(vec(set[1]), (std::vector<Label>{1, 4}));
  EXPECT_EQ(vec(set[2]), (std::vector<Label>{2, 3}));
  EXPECT_EQ(vec(set[3]), (std::vector<Label>{2, 4}));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(set.count(i), 1u);
  EXPECT_EQ(vec(set[set.origin_index()[1]]), (std::vector<Label>{1, 4}));
}

TEST(BuildFeatureVectors, FullDuplication) {
  const std::vector<FeatureMap> maps{row<FeatureMap>({1, 1}), row<FeatureMap>({3, 3})};
  const FeatureVectorSet set = build_feature_vectors(maps);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(vec(set[0]), (std::vector<Label>{1, 3}));
  EXPECT_EQ(set.count(0), 2u);
}

TEST(BuildFeatureVectors, SingleMap) {
  const std::vector<FeatureMap> maps{row<FeatureMap>({1, 2, 1})};
  const FeatureVectorSet set = build_feature_vectors(maps);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(vec(set[0]), (std::vector<Label>{1}));
  EXPECT_EQ(set.count(0), 2u);
  EXPECT_EQ(vec(set[1]), (std::vector<Label>{2}));
  EXPECT_EQ(set.count(1), 1u);
  const std::vector<std::uint32_t> origin(set.origin_index().begin(), set.origin_index().end());
  EXPECT_EQ(origin, (std::vector<std::uint32_t>{0, 1, 0}));
}

TEST(SelectClusterCount, RoundsMeanHalfUp) {
  EXPECT_EQ(select_cluster_count(
                SegmentationGroup::uniform("g", {counting(4), counting(6), counting(5)})),
            5u);
  EXPECT_EQ(select_cluster_count(SegmentationGroup::uniform("g", {counting(4), counting(5)})), 5u);
  EXPECT_EQ(select_cluster_count(SegmentationGroup::uniform("g", {counting(7)})), 7u);
  EXPECT_EQ(select_cluster_count(SegmentationGroup::uniform("g", {LabelMap(2, 2, 0)})), 1u);
}

TEST(Fuse, SingleAnnotatorIsFixedPoint) {
  testing::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap s =
        normalize_labels(testing::random_label_map_within(rng, 80, 7, /*allow_background=*/trial % 2));
    if (region_count(s) == 0) continue;
    const LabelMap out = fuse(SegmentationGroup::uniform("g", {s}));
    ASSERT_TRUE(partition_equal(out, s)) << "trial " << trial;
  }
}

TEST(Fuse, UnanimousMembersReproduceInput) {
  testing::Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const LabelMap s = normalize_labels(testing::random_label_map_within(rng, 80, 6));
    const FusionResult r = fuse_detailed(SegmentationGroup::uniform("g", {s, s, s}), {});
    ASSERT_TRUE(partition_equal(r.consensus, s));
    ASSERT_EQ(r.model.cost, 0u);
  }
}

TEST(Fuse, HandTracedTwoMemberCase) {
  // Vectors (1,3)x2, (2,3), (2,4) with K=2: (2,3) and (2,4) share a cluster.
  const auto g = SegmentationGroup::uniform("g", {row({1, 1, 2, 2}), row({1, 1, 1, 2})});
  const FusionResult r = fuse_detailed(g, {});
  EXPECT_EQ(r.k_used, 2u);
  EXPECT_EQ(r.distinct_vectors, 3u);
  EXPECT_EQ(r.model.cost, 1u);
  EXPECT_EQ(r.consensus, row({1, 1, 2, 2}));
}

TEST(Fuse, ClampsOversizedK) {
  FusionOptions o;
  o.k_override = 5;
  const FusionResult r = fuse_detailed(SegmentationGroup::uniform("g", {row({1, 2, 2})}), o);
  EXPECT_EQ(r.k_requested, 5u);
  EXPECT_EQ(r.k_used, 2u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("clamped"), std::string::npos);
}

TEST(Fuse, LowConfidencePixelsBecomeBackground) {
  // Member 2 leaves pixel 0 unannotated, so C = 0.5 there.
  const auto g = SegmentationGroup::uniform("g", {row({1, 1, 2, 2}), row({0, 1, 2, 2})});
  const FusionResult r = fuse_detailed(g, {});
  EXPECT_EQ(r.masked_pixels, 1u);
  EXPECT_EQ(r.consensus[0], kBackground);
  EXPECT_TRUE(partition_equal(r.consensus, row({0, 1, 2, 2})));
}

TEST(Fuse, LowConfidenceMemberMasksEverything) {
  SegmentationGroup g = SegmentationGroup::uniform("g", {row({1, 2}), row({1, 2})});
  g.confidences = {1.0, 0.4};  // C = 0.7 < 0.75
  const FusionResult r = fuse_detailed(g, {});
  EXPECT_EQ(r.consensus, row({0, 0}));
  EXPECT_EQ(r.k_used, 0u);
  EXPECT_FALSE(r.warnings.empty());

  FusionOptions lenient;
  lenient.confidence_threshold = 0.7;
  EXPECT_EQ(fuse(g, lenient), row({1, 2}));
}

TEST(Fuse, RejectsBadOptions) {
  const auto g = SegmentationGroup::uniform("g", {row({1, 2})});
  FusionOptions o;
  o.confidence_threshold = 0.0;
  EXPECT_THROW(fuse(g, o), InvalidArgument);
  o = {};
  o.k_override = 0;
  EXPECT_THROW(fuse(g, o), InvalidArgument);
}

TEST(FuseProperty, MemberOrderDoesNotMatterWithoutTies) {
  testing::Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 50; ++trial) {
    SegmentationGroup g = testing::synthetic_group(rng, "p", 14, 10, testing::uniform(rng, 2, 5),
                                                   testing::uniform(rng, 3, 7));
    // Tie-breaking keys on vector content, which a reordering changes; only
    // instances with unique multiplicities are order-free.
    const FeatureVectorSet set = build_feature_vectors(assign_global_ids(g));
    std::set<std::uint64_t> counts(set.vectors().counts().begin(), set.vectors().counts().end());
    if (counts.size() != set.size()) continue;
    ++checked;

    const LabelMap reference = fuse(g);
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    SegmentationGroup permuted{g.image_id, {}, {}};
    for (std::size_t i : order) {
      permuted.members.push_back(g.members[i]);
      permuted.confidences.push_back(g.confidences[i]);
    }
    ASSERT_TRUE(partition_equal(fuse(permuted), reference)) << "trial " << trial;
  }
  EXPECT_GE(checked, 20);
}

TEST(FuseProperty, RaisingConfidenceNeverShrinksMask) {
  testing::Rng rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    SegmentationGroup g = testing::synthetic_group(rng, "m", 8, 6, testing::uniform(rng, 1, 5), 4,
                                                   /*background_rate=*/0.3);
    for (double& p : g.confidences) p = unit(rng);
    const Mask before = binarize_confidence_map(compute_confidence_map(g), 0.75);
    const std::size_t i = testing::uniform(rng, 0, g.size() - 1);
    g.confidences[i] = g.confidences[i] + (1.0 - g.confidences[i]) * unit(rng);
    const Mask after = binarize_confidence_map(compute_confidence_map(g), 0.75);
    for (std::size_t px = 0; px < before.size(); ++px) {
      if (before[px]) {
        ASSERT_TRUE(after[px]);
      }
    }
  }
}

TEST(FuseProperty, VectorCountsCoverEveryPixel) {
  testing::Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const SegmentationGroup g = testing::synthetic_group(
        rng, "c", testing::uniform(rng, 1, 12), testing::uniform(rng, 1, 12),
        testing::uniform(rng, 1, 4), 5, /*background_rate=*/0.2);
    const auto ids = assign_global_ids(g);
    const std::size_t n = g.width() * g.height();
    ASSERT_EQ(build_feature_vectors(ids).vectors().total(), n);
    const Mask mask = binarize_confidence_map(compute_confidence_map(g), 0.75);
    ASSERT_EQ(build_feature_vectors(mask_feature_maps(ids, mask)).vectors().total(), n);
  }
}

TEST(FuseProperty, ConsensusRegionCountTracksK) {
  testing::Rng rng(23);
  double k_sum = 0.0, regions_sum = 0.0;
  const int images = 40;
  for (int i = 0; i < images; ++i) {
    const SegmentationGroup g = testing::synthetic_group(rng, "h", 40, 30, 5, 12);
    const FusionResult r = fuse_detailed(g, {});
    k_sum += static_cast<double>(r.k_requested);
    regions_sum += static_cast<double>(region_count(r.consensus));
  }
  EXPECT_NEAR(regions_sum / images, k_sum / images, 0.5);
}

}  // namespace
}  // namespace segfusion
