#pragma once

#include "dataset_io.hpp"
#include "noise.hpp"
#include "pipeline.hpp"

#include <filesystem>
#include <optional>

namespace heterolp {

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kUniform;
  double rate = 0.4;
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> flip_permutation;
  bool randomize_flip = false;
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double clean_fraction = 0.1;
  bool stratify = false;
};

struct RunConfig {
  std::filesystem::path dataset;  // manifest path
  std::filesystem::path output_dir = "heterolp-run";
  NoiseSpec noise;
  SplitSpec split;
  PipelineConfig pipeline;
  bool compare_baseline = true;
};

// Parses a run configuration. Every key is optional except "dataset";
// unknown keys are an error and values outside the paper's search ranges
// draw a warning. Relative paths resolve against `base_dir`.
// `overrides_json`, when non-empty, is applied to the file's object as a
// JSON merge patch before parsing (command-line flags win over the file).
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir,
                           std::string_view overrides_json = {});
RunConfig load_run_config(const std::filesystem::path& path, std::string_view overrides_json = {});

// Only the pipeline sections (reconstruct, propagate, selection, train,
// encoder, ablation); other keys are an error. Empty text gives defaults.
PipelineConfig parse_pipeline_config(std::string_view json_text);

// Every field materialized, paths absolute. Parsing the result gives back
// the same configuration.
std::string resolved_config_json(const RunConfig& config);

struct NoisyLabels {
  Split split;
  Labels observed;  // clean and noisy nodes only, kUnlabeled elsewhere
  std::size_t corrupted = 0;  // labels passed through the transition matrix
  std::size_t flipped = 0;    // of those, labels that changed
};

// Splits the nodes and corrupts the noisy set (and the clean set too when
// `corrupt_clean`, as the no-clean ablation needs).
NoisyLabels inject_noise(const Dataset& dataset, const NoiseSpec& noise, const SplitSpec& split,
                         bool corrupt_clean = false);

// One node per line, "node<TAB>role<TAB>label", role one of clean, noisy,
// val, test; val and test rows carry -1.
void write_observed_labels(const std::filesystem::path& path, const NoisyLabels& labels);
NoisyLabels read_observed_labels(const std::filesystem::path& path, std::size_t num_nodes, int classes);

struct RunOutcome {
  PipelineResult result;
  std::optional<PipelineResult> baseline;
  double observed_noise = 0.0;  // fraction of noisy-set labels that differ from the truth
};

// Loads the dataset, splits, injects noise, runs the pipeline (and the
// baseline) and writes into output_dir:
//   resolved-config.json, reports.csv, predictions.tsv, metrics.json,
//   timing.json, status.json.
// status.json reads "running" until the run finishes and "failed" with the
// error message when it throws, so partial artifacts are recognizable.
RunOutcome run_experiment(const RunConfig& config);

struct GridRow {
  std::uint64_t seed = 0;
  double test_accuracy = kNotAvailable;
  double rectification_accuracy = kNotAvailable;
  double baseline_test_accuracy = kNotAvailable;
};

struct GridSummary {
  std::vector<GridRow> rows;
  GridRow mean;
  GridRow stddev;  // sample standard deviation
};

// One run per seed (noise, split, encoder and training seeds all set to it)
// in output_dir/seed-<s>, up to `jobs` child processes at a time, then
// output_dir/summary.csv with the per-seed rows and mean/std rows.
GridSummary run_seed_grid(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                          std::size_t jobs = 1);

// Shortest round-trip text of a double; NaN prints as "nan".
std::string format_double(double v);

}  // namespace heterolp
