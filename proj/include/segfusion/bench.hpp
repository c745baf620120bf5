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

#ifndef SEGFUSION_BENCH_HPP_
#define SEGFUSION_BENCH_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "segfusion/core.hpp"
#include "segfusion/dataset.hpp"
#include "segfusion/fusion.hpp"
#include "segfusion/metrics.hpp"

namespace segfusion::bench {

namespace fs = std::filesystem;

enum class Protocol {
  fusion,  // fuse each group, score the consensus against the humans
  human,   // score each human against the remaining humans
};

struct BenchConfig {
  fs::path dataset_root;
  fs::path output_dir;
  FusionOptions fusion;
  Protocol protocol = Protocol::fusion;
  bool leave_one_out = false;
  std::vector<std::string> images;  // empty: every image under the root
  std::size_t jobs = 1;
  double voi_log_base = metrics::kVoiLogBase;
  bool save_consensus = false;

  void validate() const {
    fusion.validate();
    if (jobs == 0) throw InvalidArgument("worker count must be positive");
  }
};

inline std::vector<std::size_t> member_region_counts(const SegmentationGroup& g) {
  std::vector<std::size_t> out;
  for (const LabelMap& m : g.members) out.push_back(region_count(m));
  return out;
}

namespace detail {

inline void accumulate(ImageScores& acc, const ImageScores& s) {
  acc.gce += s.gce;
  acc.voi += s.voi;
  acc.pri += s.pri;
  acc.bde += s.bde;
  acc.covering += s.covering;
}

inline ImageScores divided(ImageScores s, double n) {
  s.gce /= n;
  s.voi /= n;
  s.pri /= n;
  s.bde /= n;
  s.covering /= n;
  return s;
}

inline SegmentationGroup without(const SegmentationGroup& g, std::size_t skip) {
  SegmentationGroup out{g.image_id, {}, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == skip) continue;
    out.members.push_back(g.members[i]);
    out.confidences.push_back(g.confidences[i]);
  }
  return out;
}

}  // namespace detail

// Fuses one group and scores the consensus. Under leave-one-out each member
// is scored against the fusion of the others and the scores are averaged;
// the stored consensus and K fields always describe the full-group fusion.
inline ImageRecord fuse_and_evaluate(const SegmentationGroup& group, const FusionOptions& options,
                                     bool leave_one_out, double voi_log_base,
                                     LabelMap* consensus_out = nullptr) {
  ImageRecord rec;
  rec.image_id = group.image_id;
  rec.members = group.size();
  rec.member_regions = member_region_counts(group);

  FusionResult full = fuse_detailed(group, options);
  rec.k_requested = full.k_requested;
  rec.k_used = full.k_used;
  rec.consensus_regions = region_count(full.consensus);
  rec.iterations = full.model.iterations;
  rec.cost = full.model.cost;
  rec.converged = full.model.converged || full.k_used == 0;
  rec.warnings = full.warnings;

  if (!leave_one_out) {
    rec.scores = metrics::evaluate(full.consensus, group.members, voi_log_base);
  } else {
    if (group.size() < 2) throw InvalidArgument("leave-one-out needs at least two members");
    ImageScores acc;
    for (std::size_t h = 0; h < group.size(); ++h) {
      const LabelMap c = fuse(detail::without(group, h), options);
      detail::accumulate(acc, metrics::evaluate(c, std::span(&group.members[h], 1), voi_log_base));
    }
    rec.scores = detail::divided(acc, static_cast<double>(group.size()));
  }
  if (consensus_out) *consensus_out = std::move(full.consensus);
  return rec;
}

// Mean over members of each member scored against all other members.
inline ImageRecord human_agreement(const SegmentationGroup& group, double voi_log_base) {
  if (group.size() < 2) throw InvalidArgument("human agreement needs at least two members");
  ImageRecord rec;
  rec.image_id = group.image_id;
  rec.members = group.size();
  rec.member_regions = member_region_counts(group);
  ImageScores acc;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const SegmentationGroup others = detail::without(group, i);
    detail::accumulate(acc, metrics::evaluate(group.members[i], others.members, voi_log_base));
  }
  rec.scores = detail::divided(acc, static_cast<double>(group.size()));
  return rec;
}

inline ImageScores mean_scores(const std::vector<ImageRecord>& records) {
  ImageScores acc;
  std::size_t n = 0;
  for (const ImageRecord& r : records) {
    if (r.error) continue;
    detail::accumulate(acc, r.scores);
    ++n;
  }
  return n ? detail::divided(acc, static_cast<double>(n)) : acc;
}

// Runs the configured protocol over the dataset. Images are processed by
// `jobs` workers; records come back in image-id order whatever the schedule.
inline MetricReport run_bench(const BenchConfig& config) {
  config.validate();
  std::vector<std::string> ids =
      config.images.empty() ? dataset::list_image_ids(config.dataset_root) : config.images;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  if (config.save_consensus && !config.output_dir.empty()) {
    fs::create_directories(config.output_dir / "consensus");
  }

  MetricReport report;
  report.records.resize(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      ImageRecord rec;
      try {
        const SegmentationGroup g = dataset::load_group(config.dataset_root, ids[i]);
        if (config.protocol == Protocol::human) {
          rec = human_agreement(g, config.voi_log_base);
        } else {
          LabelMap consensus;
          rec = fuse_and_evaluate(g, config.fusion, config.leave_one_out, config.voi_log_base,
                                  &consensus);
          if (config.save_consensus && !config.output_dir.empty()) {
            dataset::save_label_file(config.output_dir / "consensus" / (ids[i] + ".pgm"),
                                     consensus);
          }
        }
      } catch (const std::exception& e) {
        rec = ImageRecord{};
        rec.image_id = ids[i];
        rec.error = e.what();
      }
      rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      report.records[i] = std::move(rec);
    }
  };
  const std::size_t n_workers = std::min(config.jobs, std::max<std::size_t>(ids.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (const ImageRecord& r : report.records) report.failures += r.error.has_value();
  report.means = mean_scores(report.records);
  return report;
}

using Histogram = std::map<std::size_t, std::size_t>;  // region count -> frequency

// Region counts of every human segmentation, pooled.
inline Histogram original_region_histogram(const std::vector<ImageRecord>& records) {
  Histogram h;
  for (const ImageRecord& r : records) {
    if (r.error) continue;
    for (std::size_t c : r.member_regions) ++h[c];
  }
  return h;
}

inline Histogram consensus_region_histogram(const std::vector<ImageRecord>& records) {
  Histogram h;
  for (const ImageRecord& r : records) {
    if (!r.error) ++h[r.consensus_regions];
  }
  return h;
}

inline double histogram_mean(const Histogram& h) {
  double sum = 0.0, n = 0.0;
  for (const auto& [value, freq] : h) {
    sum += static_cast<double>(value * freq);
    n += static_cast<double>(freq);
  }
  return n > 0 ? sum / n : 0.0;
}

// Two-column plot data: "regions count".
inline std::string histogram_text(const Histogram& h, const std::string& title) {
  char mean[64];
  std::snprintf(mean, sizeof mean, "%.4f", histogram_mean(h));
  std::string out = "# " + title + "\n# mean " + mean + "\n# regions count\n";
  for (const auto& [value, freq] : h) {
    out += std::to_string(value) + " " + std::to_string(freq) + "\n";
  }
  return out;
}

// One self-describing JSON object per image. elapsed_ms is the only field
// that varies between identical runs.
inline nlohmann::ordered_json record_json(const ImageRecord& r) {
  nlohmann::ordered_json j;
  j["image_id"] = r.image_id;
  if (r.error) {
    j["error"] = *r.error;
  } else {
    j["gce"] = r.scores.gce;
    j["voi"] = r.scores.voi;
    j["pri"] = r.scores.pri;
    j["bde"] = r.scores.bde;
    j["covering"] = r.scores.covering;
    j["members"] = r.members;
    j["member_regions"] = r.member_regions;
    j["k_requested"] = r.k_requested;
    j["k_used"] = r.k_used;
    j["consensus_regions"] = r.consensus_regions;
    j["iterations"] = r.iterations;
    j["cost"] = r.cost;
    j["converged"] = r.converged;
    j["warnings"] = r.warnings;
  }
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

inline std::string records_jsonl(const std::vector<ImageRecord>& records) {
  std::string out;
  for (const ImageRecord& r : records) out += record_json(r).dump() + "\n";
  return out;
}

// Dataset means laid out as the two usual region-benchmark tables:
// GCE VOI PRI BDE, then COV PRI VOI.
inline std::string summary_table(const MetricReport& report, const std::string& label) {
  const ImageScores& m = report.means;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "# images %zu, failed %zu\n"
                "%-16s %10s %10s %10s %10s\n"
                "%-16s %10.6f %10.6f %10.6f %10.6f\n"
                "\n"
                "%-16s %10s %10s %10s\n"
                "%-16s %10.4f %10.4f %10.4f\n",
                report.records.size(), report.failures, "model", "GCE", "VOI", "PRI", "BDE",
                label.c_str(), m.gce, m.voi, m.pri, m.bde, "model", "COV", "PRI", "VOI",
                label.c_str(), m.covering, m.pri, m.voi);
  return buf;
}

// records.jsonl, summary.txt and, for the fusion protocol, the two
// region-count histograms.
inline void write_bench_outputs(const BenchConfig& config, const MetricReport& report,
                                const std::string& label) {
  fs::create_directories(config.output_dir);
  dataset::write_file(config.output_dir / "records.jsonl", records_jsonl(report.records));
  dataset::write_file(config.output_dir / "summary.txt", summary_table(report, label));
  if (config.protocol == Protocol::fusion) {
    dataset::write_file(
        config.output_dir / "hist_original.txt",
        histogram_text(original_region_histogram(report.records),
                       "region counts of the human segmentations"));
    dataset::write_file(config.output_dir / "hist_consensus.txt",
                        histogram_text(consensus_region_histogram(report.records),
                                       "region counts of the consensus segmentations"));
  }
}

}  // namespace segfusion::bench

#endif  // SEGFUSION_BENCH_HPP_
