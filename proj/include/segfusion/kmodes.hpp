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

#ifndef SEGFUSION_KMODES_HPP_
#define SEGFUSION_KMODES_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segfusion/core.hpp"

// Batch K-Modes over multiplicity-weighted categorical vectors.
//
// Every tie is broken deterministically:
//   assignment       -> lowest cluster index
//   per-attribute    -> smallest value
//   initial ranking  -> lexicographically smaller vector
//   empty repair     -> lexicographically smaller vector
// so identical inputs give bit-identical models.

namespace segfusion::kmodes {

enum class InitMethod { vector_density, attribute_density, random };

struct InitStrategy {
  InitMethod method = InitMethod::vector_density;
  std::uint64_t seed = 0;  // random only

  static InitStrategy vector_density() { return {InitMethod::vector_density, 0}; }
  static InitStrategy attribute_density() { return {InitMethod::attribute_density, 0}; }
  static InitStrategy random(std::uint64_t seed) { return {InitMethod::random, seed}; }
};

inline std::string to_string(InitMethod m) {
  switch (m) {
    case InitMethod::vector_density: return "vector_density";
    case InitMethod::attribute_density: return "attribute_density";
    case InitMethod::random: return "random";
  }
  return "unknown";
}

// Simple-matching dissimilarity: number of differing positions.
inline std::size_t dissimilarity(std::span<const Label> x, std::span<const Label> y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("dissimilarity of vectors with arity " + std::to_string(x.size()) +
                          " and " + std::to_string(y.size()));
  }
  std::size_t d = 0;
  for (std::size_t j = 0; j < x.size(); ++j) d += x[j] != y[j];
  return d;
}

inline bool lex_less(std::span<const Label> a, std::span<const Label> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Per-attribute weighted mode of the given members; ties go to the smaller value.
inline Mode mode_of(const WeightedVectors& set, std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidArgument("mode of an empty subset");
  Mode mode(set.arity());
  std::vector<std::pair<Label, std::uint64_t>> tally;
  tally.reserve(members.size());
  for (std::size_t j = 0; j < set.arity(); ++j) {
    tally.clear();
    for (std::size_t i : members) tally.emplace_back(set[i][j], set.count(i));
    std::sort(tally.begin(), tally.end());
    Label best = tally.front().first;
    std::uint64_t best_weight = 0;
    for (std::size_t a = 0; a < tally.size();) {
      std::size_t b = a;
      std::uint64_t w = 0;
      while (b < tally.size() && tally[b].first == tally[a].first) w += tally[b++].second;
      // Ascending value order, so strict > keeps the smallest value on ties.
      if (w > best_weight) {
        best_weight = w;
        best = tally[a].first;
      }
      a = b;
    }
    mode[j] = best;
  }
  return mode;
}

namespace detail {

inline void require_k(const WeightedVectors& set, std::size_t k) {
  if (k == 0) throw InvalidArgument("cluster count must be positive");
  if (k > set.size()) {
    throw InvalidArgument("cluster count " + std::to_string(k) + " exceeds " +
                          std::to_string(set.size()) + " distinct vectors");
  }
}

inline Mode to_mode(std::span<const Label> v) { return Mode(v.begin(), v.end()); }

}  // namespace detail

// The k distinct vectors with the largest multiplicity.
inline std::vector<Mode> init_vector_density(const WeightedVectors& set, std::size_t k) {
  detail::require_k(set, k);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (set.count(a) != set.count(b)) return set.count(a) > set.count(b);
                      return lex_less(set[a], set[b]);
                    });
  std::vector<Mode> modes;
  modes.reserve(k);
  for (std::size_t i = 0; i < k; ++i) modes.push_back(detail::to_mode(set[order[i]]));
  return modes;
}

// Numerator of the attribute density of every distinct vector:
//   sum_j |{pixels whose attribute j equals x_j}|
// The density itself is this value divided by (n * L).
inline std::vector<std::uint64_t> attribute_density_numerators(const WeightedVectors& set) {
  std::vector<std::uint64_t> density(set.size(), 0);
  std::unordered_map<Label, std::uint64_t> freq;
  for (std::size_t j = 0; j < set.arity(); ++j) {
    freq.clear();
    for (std::size_t i = 0; i < set.size(); ++i) freq[set[i][j]] += set.count(i);
    for (std::size_t i = 0; i < set.size(); ++i) density[i] += freq[set[i][j]];
  }
  return density;
}

// Density-and-distance initialization: the densest vector first, then
// repeatedly the vector maximizing density x distance to the nearest chosen
// center. Scores are compared as exact integers.
inline std::vector<Mode> init_attribute_density(const WeightedVectors& set, std::size_t k) {
  detail::require_k(set, k);
  const std::vector<std::uint64_t> density = attribute_density_numerators(set);

  auto better = [&](std::uint64_t score_a, std::size_t a, std::uint64_t score_b, std::size_t b) {
    if (score_a != score_b) return score_a > score_b;
    return lex_less(set[a], set[b]);
  };

  std::vector<std::uint8_t> chosen(set.size(), 0);
  std::vector<std::size_t> nearest(set.size(), set.arity() + 1);
  std::vector<Mode> modes;
  modes.reserve(k);

  std::size_t first = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (better(density[i], i, density[first], first)) first = i;
  }
  chosen[first] = 1;
  modes.push_back(detail::to_mode(set[first]));

  while (modes.size() < k) {
    const Mode& last = modes.back();
    std::size_t pick = set.size();
    std::uint64_t pick_score = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (chosen[i]) continue;
      nearest[i] = std::min(nearest[i], dissimilarity(set[i], last));
      const std::uint64_t score = density[i] * nearest[i];
      if (pick == set.size() || better(score, i, pick_score, pick)) {
        pick = i;
        pick_score = score;
      }
    }
    chosen[pick] = 1;
    modes.push_back(detail::to_mode(set[pick]));
  }
  return modes;
}

// k distinct vectors sampled uniformly without replacement.
inline std::vector<Mode> init_random(const WeightedVectors& set, std::size_t k,
                                     std::uint64_t seed) {
  detail::require_k(set, k);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Mode> modes;
  modes.reserve(k);
  for (std::size_t i = 0; i < k; ++i) modes.push_back(detail::to_mode(set[order[i]]));
  return modes;
}

inline std::vector<Mode> initialize(const WeightedVectors& set, std::size_t k,
                                    const InitStrategy& init) {
  switch (init.method) {
    case InitMethod::vector_density: return init_vector_density(set, k);
    case InitMethod::attribute_density: return init_attribute_density(set, k);
    case InitMethod::random: return init_random(set, k, init.seed);
  }
  throw InvalidArgument("unknown initialization method");
}

// Nearest mode for every vector, ties to the lowest cluster index.
inline std::vector<std::uint32_t> assign(const WeightedVectors& set,
                                         const std::vector<Mode>& modes) {
  std::vector<std::uint32_t> out(set.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::size_t best = dissimilarity(set[i], modes[0]);
    for (std::size_t c = 1; c < modes.size() && best > 0; ++c) {
      const std::size_t d = dissimilarity(set[i], modes[c]);
      if (d < best) {
        best = d;
        out[i] = static_cast<std::uint32_t>(c);
      }
    }
  }
  return out;
}

inline std::uint64_t weighted_cost(const WeightedVectors& set, const std::vector<Mode>& modes,
                                   std::span<const std::uint32_t> assignment) {
  std::uint64_t cost = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    cost += set.count(i) * dissimilarity(set[i], modes[assignment[i]]);
  }
  return cost;
}

namespace detail {

// Gives every empty cluster the heaviest badly-fitting vector it can take
// without emptying another cluster. The seized vector becomes the new mode.
inline void repair_empty_clusters(const WeightedVectors& set, std::vector<Mode>& modes,
                                  std::vector<std::uint32_t>& assignment) {
  std::vector<std::size_t> sizes(modes.size(), 0);
  for (std::uint32_t a : assignment) ++sizes[a];
  for (std::size_t c = 0; c < modes.size(); ++c) {
    if (sizes[c] != 0) continue;
    std::size_t pick = set.size();
    std::uint64_t pick_score = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const std::uint64_t score = set.count(i) * dissimilarity(set[i], modes[assignment[i]]);
      if (pick == set.size() || score > pick_score ||
          (score == pick_score && lex_less(set[i], set[pick]))) {
        pick = i;
        pick_score = score;
      }
    }
    // k <= distinct vectors guarantees some cluster holds two or more.
    --sizes[assignment[pick]];
    assignment[pick] = static_cast<std::uint32_t>(c);
    sizes[c] = 1;
    modes[c] = to_mode(set[pick]);
  }
}

}  // namespace detail

// Alternates assignment and mode update until the assignment is a fixed
// point or max_iterations updates have run. cost_history[0] is the cost of the
// initial assignment; each further entry follows one update+assign round.
inline ClusterModel cluster(const WeightedVectors& set, std::size_t k,
                            const InitStrategy& init, std::size_t max_iterations = 100) {
  if (max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
  ClusterModel model;
  model.modes = initialize(set, k, init);
  model.assignment = assign(set, model.modes);
  model.cost_history.push_back(weighted_cost(set, model.modes, model.assignment));

  std::vector<std::vector<std::size_t>> members(k);
  while (model.iterations < max_iterations) {
    ++model.iterations;
    detail::repair_empty_clusters(set, model.modes, model.assignment);

    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < set.size(); ++i) members[model.assignment[i]].push_back(i);
    for (std::size_t c = 0; c < k; ++c) model.modes[c] = mode_of(set, members[c]);

    std::vector<std::uint32_t> next = assign(set, model.modes);
    model.cost_history.push_back(weighted_cost(set, model.modes, next));
    const bool stable = next == model.assignment;
    model.assignment = std::move(next);
    if (stable) {
      model.converged = true;
      break;
    }
  }
  model.cost = model.cost_history.back();
  return model;
}

inline ClusterModel cluster(const FeatureVectorSet& set, std::size_t k, const InitStrategy& init,
                            std::size_t max_iterations = 100) {
  return cluster(set.vectors(), k, init, max_iterations);
}

}  // namespace segfusion::kmodes

#endif  // SEGFUSION_KMODES_HPP_
