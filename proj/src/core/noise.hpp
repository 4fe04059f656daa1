#pragma once

#include "common.hpp"

#include <optional>
#include <string_view>

namespace heterolp {

enum class NoiseKind { kUniform, kFlip };

NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseKind kind);

// Row-stochastic c x c corruption matrix: T(i, j) = P(observed j | true i).
struct TransitionMatrix {
  Mat probabilities;
  NoiseKind kind = NoiseKind::kUniform;
  double rate = 0.0;
  // Flip noise only: the single class each true class is flipped into.
  std::vector<int> flip_target;

  int classes() const { return static_cast<int>(probabilities.rows()); }
};

struct FlipPairing {
  // Explicit class map; must be a derangement of 0..c-1.
  std::optional<std::vector<int>> permutation;
  // Draw a random derangement from the engine instead of i -> (i + 1) mod c.
  bool randomize = false;
};

TransitionMatrix transition_matrix(NoiseKind kind, double rate, int classes, Rng& rng,
                                   const FlipPairing& pairing = {});

// Resamples every labeled entry from its row of T; unlabeled entries and the
// support are unchanged.
Labels corrupt_labels(const Labels& labels, const TransitionMatrix& t, Rng& rng);

}  // namespace heterolp
