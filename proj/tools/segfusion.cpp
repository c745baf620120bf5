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

// segfusion command line: fuse, eval, bench.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segfusion/segfusion.hpp"

namespace fs = std::filesystem;
using namespace segfusion;

namespace {

struct FusionFlags {
  std::string init = "vec";
  double threshold = 0.75;
  std::optional<std::size_t> k;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--init", init, "Initialization: vec, attr or random")
        ->check(CLI::IsMember({"vec", "attr", "random"}))
        ->capture_default_str();
    app->add_option("--threshold", threshold, "Confidence threshold in (0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--k", k, "Cluster count (default: mean member region count)")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters, "K-Modes iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for --init random")->capture_default_str();
  }

  FusionOptions options() const {
    FusionOptions o;
    o.confidence_threshold = threshold;
    o.init_method = init == "attr"     ? kmodes::InitMethod::attribute_density
                    : init == "random" ? kmodes::InitMethod::random
                                       : kmodes::InitMethod::vector_density;
    o.max_iterations = max_iters;
    o.seed = seed;
    o.k_override = k;
    return o;
  }
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int run_fuse(const fs::path& group_dir, const fs::path& out_dir, const FusionFlags& flags,
             bool write_seg) {
  const auto start = std::chrono::steady_clock::now();
  const SegmentationGroup group = dataset::load_group_dir(group_dir);
  const FusionOptions options = flags.options();
  const FusionResult result = fuse_detailed(group, options);
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(out_dir);
  dataset::save_label_file(out_dir / "consensus.pgm", result.consensus);
  dataset::write_file(out_dir / "consensus_color.ppm",
                      image::render_label_image(result.consensus));
  std::vector<std::string> warnings = result.warnings;
  if (write_seg) {
    try {
      dataset::write_file(out_dir / "consensus.seg", seg::write_seg(result.consensus));
    } catch (const InvalidArgument& e) {
      warnings.push_back(std::string("consensus.seg not written: ") + e.what());
    }
  }

  std::ostringstream m;
  m << "image_id " << group.image_id << "\n"
    << "members " << group.size() << "\n"
    << "confidences";
  for (double p : group.confidences) m << " " << fmt(p, "%.4f");
  m << "\n"
    << "init " << kmodes::to_string(options.init_method) << "\n"
    << "threshold " << fmt(options.confidence_threshold, "%.4f") << "\n"
    << "k_requested " << result.k_requested << "\n"
    << "k_used " << result.k_used << "\n"
    << "consensus_regions " << region_count(result.consensus) << "\n"
    << "distinct_vectors " << result.distinct_vectors << "\n"
    << "masked_pixels " << result.masked_pixels << "\n"
    << "iterations " << result.model.iterations << "\n"
    << "cost " << result.model.cost << "\n"
    << "converged " << (result.model.converged ? "true" : "false") << "\n"
    << "elapsed_ms " << fmt(elapsed, "%.3f") << "\n";
  for (const std::string& w : warnings) m << "warning " << w << "\n";
  dataset::write_file(out_dir / "manifest.txt", m.str());

  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << group.image_id << ": K=" << result.k_used << " iterations="
            << result.model.iterations << " cost=" << result.model.cost << " -> "
            << (out_dir / "consensus.pgm").string() << "\n";
  return 0;
}

void print_record(const ImageRecord& r) {
  if (r.error) {
    std::cout << r.image_id << "  ERROR " << *r.error << "\n";
    return;
  }
  std::cout << r.image_id << "  gce " << fmt(r.scores.gce) << "  voi " << fmt(r.scores.voi)
            << "  pri " << fmt(r.scores.pri) << "  bde " << fmt(r.scores.bde) << "  cov "
            << fmt(r.scores.covering) << "\n";
}

int run_eval(const fs::path& candidate, const fs::path& refs, const std::optional<fs::path>& out,
             double voi_base) {
  std::vector<std::pair<std::string, fs::path>> jobs;  // image id -> candidate file
  fs::path refs_root;
  if (fs::is_directory(candidate)) {
    if (!fs::is_directory(refs)) throw Error(refs.string() + " is not a directory");
    for (const fs::path& f : dataset::member_files(candidate)) {
      if (fs::is_directory(refs / f.stem())) jobs.emplace_back(f.stem().string(), f);
    }
    if (jobs.empty()) throw Error("no candidate in " + candidate.string() + " matches " +
                                  refs.string() + "/<image id>/");
    refs_root = refs;
  } else {
    if (!fs::exists(candidate)) throw Error(candidate.string() + " does not exist");
    if (!fs::is_directory(refs)) throw Error(refs.string() + " is not a directory");
    jobs.emplace_back(candidate.stem().string(), candidate);
  }

  MetricReport report;
  for (const auto& [id, file] : jobs) {
    ImageRecord r;
    r.image_id = id;
    try {
      const LabelMap cand = normalize_labels(dataset::load_label_file(file));
      const SegmentationGroup g = refs_root.empty() ? dataset::load_group_dir(refs, id)
                                                    : dataset::load_group(refs_root, id);
      r.members = g.size();
      r.member_regions = bench::member_region_counts(g);
      r.consensus_regions = region_count(cand);
      r.scores = metrics::evaluate(cand, g.members, voi_base);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    print_record(r);
    report.records.push_back(std::move(r));
  }
  for (const ImageRecord& r : report.records) report.failures += r.error.has_value();
  report.means = bench::mean_scores(report.records);
  if (report.records.size() > 1) {
    std::cout << "\n" << bench::summary_table(report, "candidate");
  }
  if (out) {
    fs::create_directories(*out);
    dataset::write_file(*out / "records.jsonl", bench::records_jsonl(report.records));
    dataset::write_file(*out / "summary.txt", bench::summary_table(report, "candidate"));
  }
  return report.failures ? 1 : 0;
}

int run_benchmark(bench::BenchConfig config) {
  const auto start = std::chrono::steady_clock::now();
  const MetricReport report = bench::run_bench(config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string label = "HUMAN";
  if (config.protocol == bench::Protocol::fusion) {
    label = config.fusion.init_method == kmodes::InitMethod::vector_density      ? "OURS VEC"
            : config.fusion.init_method == kmodes::InitMethod::attribute_density ? "OURS ATTR"
                                                                                 : "OURS RANDOM";
  }
  if (!config.output_dir.empty()) bench::write_bench_outputs(config, report, label);

  for (const ImageRecord& r : report.records) {
    if (r.error) std::cerr << r.image_id << ": " << *r.error << "\n";
  }
  std::cout << bench::summary_table(report, label);
  if (config.protocol == bench::Protocol::fusion) {
    std::cout << "\nmean region count: original "
              << fmt(bench::histogram_mean(bench::original_region_histogram(report.records)),
                     "%.3f")
              << ", consensus "
              << fmt(bench::histogram_mean(bench::consensus_region_histogram(report.records)),
                     "%.3f")
              << "\n";
  }
  std::cout << "elapsed " << fmt(seconds, "%.1f") << " s\n";
  return report.failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus segmentation fusion with K-Modes, and region benchmarks"};
  app.require_subcommand(1);

  FusionFlags fuse_flags;
  fs::path fuse_group, fuse_out;
  bool fuse_seg = false;
  auto* fuse = app.add_subcommand("fuse", "Fuse the segmentations in one group directory");
  fuse->add_option("group", fuse_group, "Directory of .seg/.pgm members")->required();
  fuse->add_option("--out", fuse_out, "Output directory")->required();
  fuse->add_flag("--seg", fuse_seg, "Also write consensus.seg");
  fuse_flags.attach(fuse);

  fs::path eval_candidate, eval_refs;
  std::optional<fs::path> eval_out;
  double eval_voi_base = metrics::kVoiLogBase;
  auto* eval = app.add_subcommand(
      "eval", "Score a candidate file against a group directory, or a directory of candidates "
              "named <image id>.{seg,pgm} against a dataset root");
  eval->add_option("candidate", eval_candidate, "Candidate file or directory")->required();
  eval->add_option("refs", eval_refs, "Reference group directory or dataset root")->required();
  eval->add_option("--out", eval_out, "Write records.jsonl and summary.txt here");
  eval->add_option("--voi-base", eval_voi_base, "Logarithm base for VOI")->capture_default_str();

  FusionFlags bench_flags;
  bench::BenchConfig config;
  std::string images;
  bool human = false;
  auto* bench_cmd = app.add_subcommand("bench", "Fuse and score every image of a dataset");
  bench_cmd->add_option("dataset", config.dataset_root, "Dataset root (<root>/<image id>/...)")
      ->required();
  bench_cmd->add_option("--out", config.output_dir, "Output directory");
  bench_cmd->add_flag("--leave-one-out", config.leave_one_out,
                      "Score each human against the fusion of the others");
  bench_cmd->add_flag("--human", human, "Score humans against each other instead of fusing");
  bench_cmd->add_option("--images", images, "Comma-separated image ids to run");
  bench_cmd->add_option("--jobs", config.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--voi-base", config.voi_log_base, "Logarithm base for VOI")
      ->capture_default_str();
  bench_cmd->add_flag("--save-consensus", config.save_consensus,
                      "Write each consensus to <out>/consensus/<image id>.pgm");
  bench_flags.attach(bench_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fuse) return run_fuse(fuse_group, fuse_out, fuse_flags, fuse_seg);
    if (*eval) return run_eval(eval_candidate, eval_refs, eval_out, eval_voi_base);
    if (*bench_cmd) {
      config.fusion = bench_flags.options();
      config.protocol = human ? bench::Protocol::human : bench::Protocol::fusion;
      std::stringstream ss(images);
      for (std::string id; std::getline(ss, id, ',');) {
        if (!id.empty()) config.images.push_back(id);
      }
      return run_benchmark(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
