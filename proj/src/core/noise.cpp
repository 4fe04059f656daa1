#include "noise.hpp"

#include <algorithm>
#include <numeric>

namespace heterolp {

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "flip") return NoiseKind::kFlip;
  fail(ErrorCode::kInvalidArgument,
       "unknown noise kind '" + std::string(name) + "' (expected uniform or flip)");
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::kUniform ? "uniform" : "flip";
}

namespace {

bool is_derangement(const std::vector<int>& p) {
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (sorted[i] != static_cast<int>(i) || p[i] == static_cast<int>(i)) return false;
  }
  return true;
}

}  // namespace

TransitionMatrix transition_matrix(NoiseKind kind, double rate, int classes, Rng& rng,
                                   const FlipPairing& pairing) {
  if (classes < 2) {
    fail(ErrorCode::kInvalidArgument, "transition_matrix: need at least 2 classes");
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "transition_matrix: rate must lie in [0, 1]");
  }
  TransitionMatrix t;
  t.kind = kind;
  t.rate = rate;
  t.probabilities = Mat::Zero(classes, classes);

  if (kind == NoiseKind::kUniform) {
    t.probabilities.setConstant(rate / (classes - 1));
    t.probabilities.diagonal().setConstant(1.0 - rate);
    return t;
  }

  std::vector<int> target(static_cast<std::size_t>(classes));
  if (pairing.permutation) {
    target = *pairing.permutation;
    require(static_cast<int>(target.size()) == classes && is_derangement(target),
            "transition_matrix: flip pairing must be a derangement of the classes");
  } else if (pairing.randomize) {
    std::iota(target.begin(), target.end(), 0);
    do {
      std::shuffle(target.begin(), target.end(), rng);
    } while (!is_derangement(target));
  } else {
    for (int i = 0; i < classes; ++i) target[i] = (i + 1) % classes;
  }
  for (int i = 0; i < classes; ++i) {
    t.probabilities(i, i) = 1.0 - rate;
    t.probabilities(i, target[i]) += rate;
  }
  t.flip_target = std::move(target);
  return t;
}

Labels corrupt_labels(const Labels& labels, const TransitionMatrix& t, Rng& rng) {
  const int c = t.classes();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Labels out = labels;
  for (auto& y : out) {
    if (y == kUnlabeled) continue;
    if (y < 0 || y >= c) {
      fail(ErrorCode::kInvalidArgument,
           "corrupt_labels: label " + std::to_string(y) + " outside [0, " +
               std::to_string(c) + ")");
    }
    const double u = unit(rng);
    double acc = 0.0;
    int drawn = -1;
    for (int j = 0; j < c; ++j) {
      acc += t.probabilities(y, j);
      if (u < acc) {
        drawn = j;
        break;
      }
    }
    // Rounding can leave acc a hair below 1; fall back to the last class
    // with positive mass.
    for (int j = c - 1; drawn < 0; --j) {
      if (t.probabilities(y, j) > 0.0) drawn = j;
    }
    y = drawn;
  }
  return out;
}

}  // namespace heterolp
