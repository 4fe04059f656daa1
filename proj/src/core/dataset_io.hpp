#pragma once

#include "synth.hpp"

#include <filesystem>
#include <optional>

namespace heterolp {

// Manifest (JSON):
//   { "name": "cora", "num_nodes": 2708, "num_edges": 5278, "num_classes": 7,
//     "num_features": 1433, "edges": "edges.tsv", "labels": "labels.txt",
//     "features": "features.csv" }
// File paths are relative to the manifest's directory. num_edges and
// num_features are optional; when present they are checked against the files.
struct Manifest {
  std::string name;
  std::size_t num_nodes = 0;
  std::optional<std::size_t> num_edges;
  int num_classes = 0;
  std::optional<std::size_t> num_features;
  std::filesystem::path edges;
  std::filesystem::path labels;
  std::filesystem::path features;
};

Manifest read_manifest(const std::filesystem::path& path);

// Edge list: one "u<TAB>v" pair per line, 0-indexed; blank lines are skipped.
Graph read_edge_list(const std::filesystem::path& path, std::size_t num_nodes);
// One integer class per line, exactly num_nodes lines.
Labels read_labels(const std::filesystem::path& path, std::size_t num_nodes, int classes);
// CSV of floats, one node per row, a constant column count.
Mat read_features(const std::filesystem::path& path, std::size_t num_nodes);

// Parses the manifest and the three files. Declared counts that differ from
// the parsed ones are an error naming both.
Dataset load_dataset(const std::filesystem::path& manifest);

// Writes edges.tsv, labels.txt, features.csv and <stem>.json into `dir` and
// returns the manifest path.
std::filesystem::path save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                                   const std::string& stem = "manifest");

}  // namespace heterolp
