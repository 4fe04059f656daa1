#pragma once

#include "common.hpp"

namespace heterolp::theory {

// Binary-label model of one-round propagation: node i keeps its noisy label
// with weight 1 - alpha and averages its `degree` neighbors' noisy labels with
// weight alpha. Each neighbor shares i's true label with probability p, and
// every label flips with probability e.
struct DenoiseParams {
  double e = 0.0;
  double p = 1.0;
  int degree = 1;
  double alpha = 0.0;
  double prior0 = 0.5;  // P(Y = 0)

  void validate() const;
};

struct Moments {
  double mean_given_0;  // E(Y-hat | Y = 0)
  double mean_given_1;  // E(Y-hat | Y = 1)
  double variance;      // Var(Y-hat | Y), the same for both classes
};

Moments denoise_moments(const DenoiseParams& params);

// E(Y - Y-hat)^2 = P0 E0^2 + (1 - P0)(E1 - 1)^2 + Var.
double denoise_gap(const DenoiseParams& params);

// Probability that a neighbor's noisy label is 1 given the node's true label y.
double neighbor_one_probability(double p, double e, int y);

// Distribution of the neighbors' noisy-label sum: Binomial(degree, q) with
// q = neighbor_one_probability(p, e, y). Length degree + 1.
std::vector<double> neighbor_sum_pmf(int degree, double p, double e, int y);

struct MonteCarloEstimate {
  double gap;
  double standard_error;
  std::uint64_t trials;
};

// Simulates the model directly: draws Y from the prior, each neighbor's true
// label (same as Y with probability p), flips every label with probability e,
// applies one smoothing round and averages (Y - Y-hat)^2. Trials are split in
// fixed chunks with per-chunk engines so the estimate does not depend on the
// thread count.
MonteCarloEstimate monte_carlo_gap(const DenoiseParams& params, std::uint64_t trials,
                                   std::uint64_t seed);

struct GridCell {
  DenoiseParams params;
  double analytic;
  MonteCarloEstimate empirical;
  bool pass;  // |analytic - empirical| <= tolerance_se * SE
};

struct Grid {
  std::vector<double> e;
  std::vector<double> p;
  std::vector<int> degree;
  std::vector<double> alpha;
  double prior0 = 0.5;
};

std::vector<GridCell> verify_grid(const Grid& grid, std::uint64_t trials, std::uint64_t seed,
                                  double tolerance_se = 4.0);

}  // namespace heterolp::theory
