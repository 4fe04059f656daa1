#include <doctest.h>

#include "noise.hpp"

#include <cmath>

using namespace heterolp;

TEST_CASE("noise: uniform transition matrix") {
  Rng rng(0);
  const TransitionMatrix t = transition_matrix(NoiseKind::kUniform, 0.4, 5, rng);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) CHECK(t.probabilities(i, j) == doctest::Approx(i == j ? 0.6 : 0.1));
  }
  CHECK((t.probabilities - t.probabilities.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise: zero rate gives the identity for both kinds") {
  Rng rng(0);
  for (NoiseKind k : {NoiseKind::kUniform, NoiseKind::kFlip}) {
    const TransitionMatrix t = transition_matrix(k, 0.0, 4, rng);
    CHECK((t.probabilities - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("noise: binary flip matrix") {
  Rng rng(0);
  const TransitionMatrix t = transition_matrix(NoiseKind::kFlip, 0.6, 2, rng);
  CHECK(t.probabilities(0, 0) == doctest::Approx(0.4));
  CHECK(t.probabilities(0, 1) == doctest::Approx(0.6));
  CHECK(t.probabilities(1, 0) == doctest::Approx(0.6));
  CHECK(t.probabilities(1, 1) == doctest::Approx(0.4));
}

TEST_CASE("noise: flip pairing is the cyclic successor unless overridden") {
  Rng rng(1);
  const TransitionMatrix cyc = transition_matrix(NoiseKind::kFlip, 0.3, 4, rng);
  CHECK(cyc.flip_target == std::vector<int>{1, 2, 3, 0});
  for (int i = 0; i < 4; ++i) CHECK(cyc.probabilities.row(i).sum() == doctest::Approx(1.0));

  FlipPairing explicit_map;
  explicit_map.permutation = std::vector<int>{2, 3, 0, 1};
  const TransitionMatrix ex = transition_matrix(NoiseKind::kFlip, 0.3, 4, rng, explicit_map);
  CHECK(ex.probabilities(0, 2) == doctest::Approx(0.3));
  CHECK(ex.probabilities(3, 1) == doctest::Approx(0.3));

  FlipPairing bad;
  bad.permutation = std::vector<int>{0, 2, 1, 3};
  CHECK_THROWS_AS(transition_matrix(NoiseKind::kFlip, 0.3, 4, rng, bad), Error);

  FlipPairing random_map;
  random_map.randomize = true;
  const TransitionMatrix rnd = transition_matrix(NoiseKind::kFlip, 0.3, 6, rng, random_map);
  for (int i = 0; i < 6; ++i) CHECK(rnd.flip_target[i] != i);
}

TEST_CASE("noise: identity matrix leaves labels untouched, support is preserved") {
  Rng rng(3);
  const TransitionMatrix id = transition_matrix(NoiseKind::kUniform, 0.0, 3, rng);
  const Labels y{0, 1, 2, kUnlabeled, 1, kUnlabeled};
  CHECK(corrupt_labels(y, id, rng) == y);

  const TransitionMatrix t = transition_matrix(NoiseKind::kUniform, 0.9, 3, rng);
  const Labels out = corrupt_labels(y, t, rng);
  for (std::size_t v = 0; v < y.size(); ++v) CHECK((out[v] == kUnlabeled) == (y[v] == kUnlabeled));
}

TEST_CASE("noise: full binary flip inverts every label") {
  Rng rng(4);
  const TransitionMatrix t = transition_matrix(NoiseKind::kFlip, 1.0, 2, rng);
  const Labels y{0, 1, 1, 0, 0};
  const Labels out = corrupt_labels(y, t, rng);
  for (std::size_t v = 0; v < y.size(); ++v) CHECK(out[v] == 1 - y[v]);
}

TEST_CASE("noise: empirical retention and off-diagonal frequencies") {
  Rng rng(5);
  const TransitionMatrix t = transition_matrix(NoiseKind::kUniform, 0.4, 5, rng);
  const std::size_t n = 100000;
  const Labels y(n, 0);
  const Labels out = corrupt_labels(y, t, rng);
  std::vector<double> freq(5, 0.0);
  for (auto v : out) freq[v] += 1.0 / n;
  // 3 sigma of the binomial standard deviation.
  const double sd_keep = std::sqrt(0.6 * 0.4 / n);
  CHECK(std::abs(freq[0] - 0.6) <= 3 * sd_keep);
  CHECK(std::abs(freq[0] - 0.6) <= 0.005);
  // Chi-square over the 5 cells, 4 degrees of freedom; 18.47 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int j = 0; j < 5; ++j) {
    const double expect = n * t.probabilities(0, j);
    chi2 += std::pow(freq[j] * n - expect, 2) / expect;
  }
  CHECK(chi2 < 18.47);
}

TEST_CASE("noise: kind names round-trip") {
  CHECK(parse_noise_kind("uniform") == NoiseKind::kUniform);
  CHECK(parse_noise_kind(to_string(NoiseKind::kFlip)) == NoiseKind::kFlip);
  CHECK_THROWS_AS(parse_noise_kind("pair"), Error);
}
