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

#ifndef SEGFUSION_METRICS_HPP_
#define SEGFUSION_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "segfusion/core.hpp"

// Region benchmarks. Everything is derived from the contingency table of two
// segmentations, so cost is linear in the pixel count. Label 0 is treated as
// an ordinary region here.

namespace segfusion::metrics {

// Log base used for entropies in VOI.
inline constexpr double kVoiLogBase = 2.0;

struct ContingencyCell {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::uint64_t count = 0;
};

// Overlap counts of two partitions. Rows index the regions of the first map
// and columns those of the second, both in ascending label order; only
// non-empty cells are stored.
struct ContingencyTable {
  std::vector<Label> row_labels;
  std::vector<Label> col_labels;
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::vector<ContingencyCell> cells;  // sorted by (row, col)
  std::uint64_t total = 0;

  std::size_t rows() const noexcept { return row_sums.size(); }
  std::size_t cols() const noexcept { return col_sums.size(); }

  std::uint64_t at(std::size_t r, std::size_t c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{r, c},
                               [](const ContingencyCell& cell, const auto& key) {
                                 return std::pair<std::size_t, std::size_t>{cell.row, cell.col} <
                                        key;
                               });
    return it != cells.end() && it->row == r && it->col == c ? it->count : 0;
  }
};

namespace detail {

inline std::vector<std::uint32_t> dense_index(std::span<const Label> labels,
                                              std::vector<Label>& distinct) {
  distinct.assign(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::unordered_map<Label, std::uint32_t> index;
  index.reserve(distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    index.emplace(distinct[i], static_cast<std::uint32_t>(i));
  }
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = index.at(labels[i]);
  return out;
}

// n choose 2
inline std::uint64_t pairs(std::uint64_t n) { return n * (n - (n > 0)) / 2; }

}  // namespace detail

inline ContingencyTable contingency(const LabelMap& s1, const LabelMap& s2) {
  require_same_shape(s1, s2, "contingency");
  ContingencyTable t;
  const auto r = detail::dense_index(s1.values(), t.row_labels);
  const auto c = detail::dense_index(s2.values(), t.col_labels);
  t.row_sums.assign(t.row_labels.size(), 0);
  t.col_sums.assign(t.col_labels.size(), 0);
  t.total = s1.size();

  std::unordered_map<std::uint64_t, std::uint64_t> cells;
  const std::uint64_t stride = t.col_labels.size();
  for (std::size_t i = 0; i < r.size(); ++i) {
    ++t.row_sums[r[i]];
    ++t.col_sums[c[i]];
    ++cells[r[i] * stride + c[i]];
  }
  t.cells.reserve(cells.size());
  for (const auto& [key, count] : cells) {
    t.cells.push_back({static_cast<std::uint32_t>(key / stride),
                       static_cast<std::uint32_t>(key % stride), count});
  }
  std::sort(t.cells.begin(), t.cells.end(), [](const ContingencyCell& a, const ContingencyCell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return t;
}

// Global Consistency Error.
inline double gce(const ContingencyTable& t) {
  if (t.total == 0) return 0.0;
  double forward = 0.0;
  double backward = 0.0;
  for (const ContingencyCell& cell : t.cells) {
    const double n = static_cast<double>(cell.count);
    const double rs = static_cast<double>(t.row_sums[cell.row]);
    const double cs = static_cast<double>(t.col_sums[cell.col]);
    forward += n * (rs - n) / rs;
    backward += n * (cs - n) / cs;
  }
  return std::min(forward, backward) / static_cast<double>(t.total);
}

inline double gce(const LabelMap& s1, const LabelMap& s2) { return gce(contingency(s1, s2)); }

// Variation of information H(S1|S2) + H(S2|S1), summed cell by cell so that
// identical partitions give exactly zero.
inline double voi(const ContingencyTable& t, double log_base = kVoiLogBase) {
  if (t.total == 0) return 0.0;
  double acc = 0.0;
  for (const ContingencyCell& cell : t.cells) {
    const double c = static_cast<double>(cell.count);
    acc += c * (std::log(static_cast<double>(t.row_sums[cell.row]) / c) +
                std::log(static_cast<double>(t.col_sums[cell.col]) / c));
  }
  return acc / static_cast<double>(t.total) / std::log(log_base);
}

inline double voi(const LabelMap& s1, const LabelMap& s2, double log_base = kVoiLogBase) {
  return voi(contingency(s1, s2), log_base);
}

// Rand-index numerator for one reference: pixel pairs grouped alike in both
// maps (together in both, or apart in both).
inline std::uint64_t rand_agreements(const ContingencyTable& t) {
  std::uint64_t both = 0, in_rows = 0, in_cols = 0;
  for (const ContingencyCell& cell : t.cells) both += detail::pairs(cell.count);
  for (std::uint64_t c : t.row_sums) in_rows += detail::pairs(c);
  for (std::uint64_t c : t.col_sums) in_cols += detail::pairs(c);
  const std::uint64_t apart_both = detail::pairs(t.total) + both - in_rows - in_cols;
  return both + apart_both;
}

struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;
  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

// PRI as an exact ratio: the sum of agreeing pairs over all references,
// divided by (#refs * n(n-1)/2). The pairwise definition averages the
// co-labelling probability over references, which is linear, so this equals
// the mean Rand index.
inline Fraction pri_fraction(const LabelMap& s, std::span<const LabelMap> refs) {
  if (refs.empty()) throw InvalidArgument("PRI needs at least one reference");
  Fraction f{0, 0};
  for (const LabelMap& r : refs) {
    const ContingencyTable t = contingency(s, r);
    f.numerator += rand_agreements(t);
    f.denominator += detail::pairs(t.total);
  }
  if (f.denominator == 0) return {1, 1};  // single pixel: nothing can disagree
  return f;
}

inline double pri(const LabelMap& s, std::span<const LabelMap> refs) {
  return pri_fraction(s, refs).value();
}

// Segmentation covering of each reference by the candidate, averaged over refs.
inline double covering(const LabelMap& s, std::span<const LabelMap> refs) {
  if (refs.empty()) throw InvalidArgument("covering needs at least one reference");
  double sum = 0.0;
  for (const LabelMap& g : refs) {
    const ContingencyTable t = contingency(g, s);  // rows: reference regions
    std::vector<double> best(t.rows(), 0.0);
    for (const ContingencyCell& cell : t.cells) {
      const double inter = static_cast<double>(cell.count);
      const double uni =
          static_cast<double>(t.row_sums[cell.row] + t.col_sums[cell.col] - cell.count);
      best[cell.row] = std::max(best[cell.row], inter / uni);
    }
    double c = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) c += static_cast<double>(t.row_sums[r]) * best[r];
    sum += t.total ? c / static_cast<double>(t.total) : 1.0;
  }
  return sum / static_cast<double>(refs.size());
}

// Pixels with a 4-neighbour of a different label. Both sides of an edge are
// marked; the image border is not a boundary.
inline BoundaryMap boundary_map(const LabelMap& s) {
  const std::size_t w = s.width(), h = s.height();
  std::vector<std::uint8_t> b(s.size(), 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (x + 1 < w && s[i] != s[i + 1]) b[i] = b[i + 1] = 1;
      if (y + 1 < h && s[i] != s[i + w]) b[i] = b[i + w] = 1;
    }
  }
  return BoundaryMap(w, h, std::move(b));
}

// One pixel per label edge: the left/upper pixel of each differing pair.
// A boundary shifted by t columns moves its anchors by exactly t.
inline BoundaryMap boundary_anchors(const LabelMap& s) {
  const std::size_t w = s.width(), h = s.height();
  std::vector<std::uint8_t> b(s.size(), 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if ((x + 1 < w && s[i] != s[i + 1]) || (y + 1 < h && s[i] != s[i + w])) b[i] = 1;
    }
  }
  return BoundaryMap(w, h, std::move(b));
}

namespace detail {

// Squared distances along one line, lower envelope of parabolas
// (Felzenszwalb & Huttenlocher). Unset samples carry kFar.
inline constexpr double kFar = 1e20;

inline void edt_1d(std::span<const double> f, std::span<double> d, std::vector<std::size_t>& v,
                   std::vector<double>& z) {
  const std::size_t n = f.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  z[0] = -inf;
  z[1] = inf;
  for (std::size_t q = 1; q < n; ++q) {
    const double fq = f[q] + double(q) * double(q);
    auto meet = [&](std::size_t p) {
      return (fq - (f[p] + double(p) * double(p))) / (2.0 * (double(q) - double(p)));
    };
    double s = meet(v[k]);
    while (s <= z[k]) s = meet(v[--k]);  // z[0] = -inf stops this
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < double(q)) ++k;
    const double diff = double(q) - double(v[k]);
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace detail

// Exact Euclidean distance from every pixel to the nearest set pixel.
// Meaningless (about 1e10) when nothing is set.
inline std::vector<double> distance_transform(const BoundaryMap& seeds) {
  const std::size_t w = seeds.width(), h = seeds.height();
  std::vector<double> g(seeds.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = seeds[i] ? 0.0 : detail::kFar;

  std::vector<std::size_t> v;
  std::vector<double> z;
  std::vector<double> line_in(std::max(w, h)), line_out(std::max(w, h));
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < h; ++y) line_in[y] = g[y * w + x];
    detail::edt_1d(std::span(line_in).first(h), std::span(line_out).first(h), v, z);
    for (std::size_t y = 0; y < h; ++y) g[y * w + x] = line_out[y];
  }
  for (std::size_t y = 0; y < h; ++y) {
    std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(y * w), w, line_in.begin());
    detail::edt_1d(std::span(line_in).first(w), std::span(line_out).first(w), v, z);
    for (std::size_t x = 0; x < w; ++x) g[y * w + x] = std::sqrt(line_out[x]);
  }
  return g;
}

// Mean distance from each boundary pixel of `from` to the nearest boundary
// pixel of `to`.
inline double directed_boundary_distance(const BoundaryMap& from, const BoundaryMap& to) {
  const std::vector<double> dist = distance_transform(to);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!from[i]) continue;
    sum += dist[i];
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

// Boundary Displacement Error, symmetric mean of the two directed distances.
// 0 when either map has no boundary.
inline double bde(const LabelMap& s1, const LabelMap& s2) {
  require_same_shape(s1, s2, "bde");
  const BoundaryMap b1 = boundary_anchors(s1);
  const BoundaryMap b2 = boundary_anchors(s2);
  auto any = [](const BoundaryMap& b) {
    return std::any_of(b.values().begin(), b.values().end(), [](std::uint8_t v) { return v; });
  };
  if (!any(b1) || !any(b2)) return 0.0;
  return 0.5 * (directed_boundary_distance(b1, b2) + directed_boundary_distance(b2, b1));
}

// Candidate against a reference set: gce, voi and bde averaged over the
// references, pri and covering over the whole set.
inline ImageScores evaluate(const LabelMap& candidate, std::span<const LabelMap> refs,
                            double voi_log_base = kVoiLogBase) {
  if (refs.empty()) throw InvalidArgument("evaluation needs at least one reference");
  ImageScores s;
  for (const LabelMap& r : refs) {
    const ContingencyTable t = contingency(candidate, r);
    s.gce += gce(t);
    s.voi += voi(t, voi_log_base);
    s.bde += bde(candidate, r);
  }
  const double m = static_cast<double>(refs.size());
  s.gce /= m;
  s.voi /= m;
  s.bde /= m;
  s.pri = pri(candidate, refs);
  s.covering = covering(candidate, refs);
  return s;
}

}  // namespace segfusion::metrics

#endif  // SEGFUSION_METRICS_HPP_
