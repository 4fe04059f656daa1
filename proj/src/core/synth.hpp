#pragma once

#include "common.hpp"
#include "graph.hpp"

#include <string>

namespace heterolp {

// A graph with node features and ground-truth labels.
struct Dataset {
  std::string name;
  Graph graph;
  Mat features;
  Labels labels;
  int classes = 0;
};

struct SBMSpec {
  std::size_t num_nodes = 1000;
  int classes = 2;
  double p_intra = 0.02;
  double p_inter = 0.002;
  std::size_t feature_dim = 16;
  // Distance of each class mean from the origin, along its own axis.
  double separation = 1.0;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SBMSample {
  Dataset dataset;
  double expected_homophily;
  double expected_edges;
};

// Node v belongs to class v mod c. Within-block and cross-block pairs are
// sampled by geometric skipping, so the cost is O(n + |E|).
SBMSample generate_sbm(const SBMSpec& spec);

// Expected homophily and edge count implied by the block sizes and the two
// probabilities.
double sbm_expected_homophily(const SBMSpec& spec);
double sbm_expected_edges(const SBMSpec& spec);

// One SBM per size, probabilities rescaled so the expected average degree of
// `base` is kept. Member k uses seed base.seed + k.
std::vector<SBMSample> generate_scaling_series(const SBMSpec& base,
                                               const std::vector<std::size_t>& sizes);

}  // namespace heterolp
