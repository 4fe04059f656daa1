#pragma once

#include "common.hpp"
#include "graph.hpp"
#include "reconstruct.hpp"

#include <string_view>

namespace heterolp {

// Mixing weights of the propagation update
//   F(t+1) = a1 S F(t) + a2 Y_clean + a3 Y_noisy + a4 Y_pred.
struct LPMix {
  double alpha1 = 0.6;
  double alpha2 = 0.2;
  double alpha3 = 0.1;
  double alpha4 = 0.1;

  void validate() const;
  // Zero alpha3 (drop noisy labels) and renormalize the rest.
  LPMix without_noisy() const;
  // Zero alpha4 (drop predicted labels) and renormalize the rest.
  LPMix without_predicted() const;
};

enum class PropagationPath { kIterative, kClosed, kFast };

PropagationPath parse_propagation_path(std::string_view name);
std::string_view to_string(PropagationPath path);

struct PropagationResult {
  Mat f;
  PropagationPath path = PropagationPath::kIterative;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// F0 = a2 Y_clean + a3 Y_noisy + a4 Y_pred.
Mat init_label_matrix(const Mat& y_clean, const Mat& y_noisy, const Mat& y_pred, const LPMix& mix);

struct IterateOptions {
  std::size_t t_max = 100;
  double tol = 1e-6;
};

// Fixed-point iteration from F(0) = F0 until max|F(t+1) - F(t)| < tol or
// t_max steps. Ten consecutive residual increases abort as divergent.
PropagationResult lp_iterate(const SimilarityOperator& s, const Mat& f0, double alpha1,
                             const IterateOptions& options = {});

// Exact (I - a1 S)^{-1} F0 by dense LU. S must densify under the cap.
PropagationResult lp_closed_form(const SimilarityOperator& s, const Mat& f0, double alpha1,
                                 std::size_t dense_cap = 5000);

// First-order truncation (I + a1 S) F0 through the Woodbury factors:
// Q = [(1-g)^2 H H^T + (b1+b2) I]^{-1} F0 is formed right to left, then
// F = F0 + a1 D^{-1} [numerator] Q. No n x n matrix is formed.
PropagationResult lp_fast(const SimilarityOperator& s, const Mat& f0, double alpha1);

// Classical smoothing Y <- (1 - a) Y + (a / d_i) sum_{j in N(i)} Y_j,
// `rounds` times. Isolated nodes keep (1 - a) Y_i.
Mat classical_lp(const Graph& graph, const Mat& y, double alpha, std::size_t rounds);

}  // namespace heterolp
