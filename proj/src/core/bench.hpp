#pragma once

#include "synth.hpp"

namespace heterolp {

struct ScalingPoint {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  double seconds = 0.0;  // per call, best of the repeats
};

struct ScalingBench {
  SBMSpec base;  // num_nodes is replaced by each size
  std::vector<std::size_t> sizes;
  std::size_t feat_dim = 16;
  std::size_t repeats = 3;
  // Each repeat loops lp_fast until this much time has passed and reports
  // the mean per call.
  double min_sample_seconds = 0.2;
};

// Times lp_fast on one SBM per size (constant expected degree). S is the
// factored operator built from the encoder's embeddings; only the
// propagation call is timed.
std::vector<ScalingPoint> bench_lp_fast(const ScalingBench& bench);

// Least-squares slope of log(seconds) against log(num_nodes).
double loglog_slope(const std::vector<ScalingPoint>& points);

}  // namespace heterolp
