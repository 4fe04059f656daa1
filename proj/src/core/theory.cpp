#include "theory.hpp"

#include "parallel.hpp"

#include <cmath>
#include <limits>

namespace heterolp::theory {

void DenoiseParams::validate() const {
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(prob(e) && prob(p) && prob(alpha) && prob(prior0),
          "DenoiseParams: e, p, alpha and prior0 must lie in [0, 1]");
  require(degree >= 1, "DenoiseParams: degree must be at least 1");
}

double neighbor_one_probability(double p, double e, int y) {
  // Same true label (prob p) then flipped into 1, or different label then kept.
  return y == 0 ? p * e + (1.0 - p) * (1.0 - e) : p * (1.0 - e) + (1.0 - p) * e;
}

Moments denoise_moments(const DenoiseParams& params) {
  params.validate();
  const double e = params.e;
  const double a = params.alpha;
  const double q0 = neighbor_one_probability(params.p, e, 0);
  const double q1 = neighbor_one_probability(params.p, e, 1);
  Moments m;
  m.mean_given_0 = (1.0 - a) * e + a * q0;
  m.mean_given_1 = (1.0 - a) * (1.0 - e) + a * q1;
  m.variance = (1.0 - a) * (1.0 - a) * e * (1.0 - e) + a * a / params.degree * q0 * (1.0 - q0);
  return m;
}

double denoise_gap(const DenoiseParams& params) {
  const Moments m = denoise_moments(params);
  return params.prior0 * m.mean_given_0 * m.mean_given_0 +
         (1.0 - params.prior0) * (m.mean_given_1 - 1.0) * (m.mean_given_1 - 1.0) + m.variance;
}

std::vector<double> neighbor_sum_pmf(int degree, double p, double e, int y) {
  require(degree >= 0, "neighbor_sum_pmf: negative degree");
  require(y == 0 || y == 1, "neighbor_sum_pmf: true label must be 0 or 1");
  const double q = neighbor_one_probability(p, e, y);
  std::vector<double> pmf(static_cast<std::size_t>(degree) + 1);
  double binom = 1.0;
  for (int m = 0; m <= degree; ++m) {
    if (m > 0) binom = binom * (degree - m + 1) / m;
    pmf[m] = binom * std::pow(q, m) * std::pow(1.0 - q, degree - m);
  }
  return pmf;
}

namespace {

// Bernoulli(prob) from one 64-bit draw.
struct Coin {
  explicit Coin(double prob) : always(prob >= 1.0), threshold(scale(prob)) {}
  bool operator()(Rng& rng) const { return always || rng() < threshold; }

  static std::uint64_t scale(double prob) {
    if (prob <= 0.0) return 0;
    const double scaled = std::ldexp(prob, 64);
    return scaled >= 18446744073709551616.0 ? std::numeric_limits<std::uint64_t>::max()
                                            : static_cast<std::uint64_t>(scaled);
  }

  bool always;
  std::uint64_t threshold;
};

constexpr std::uint64_t kChunk = 1u << 16;

}  // namespace

MonteCarloEstimate monte_carlo_gap(const DenoiseParams& params, std::uint64_t trials,
                                   std::uint64_t seed) {
  params.validate();
  require(trials >= 2, "monte_carlo_gap: need at least two trials");
  const Coin label_one(1.0 - params.prior0);
  const Coin same(params.p);
  const Coin flip(params.e);
  const double a = params.alpha;
  const int d = params.degree;

  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks, 0.0);
  std::vector<double> squares(chunks, 0.0);
  parallel_for(chunks, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
      Rng rng(seq);
      const std::uint64_t first = c * kChunk;
      const std::uint64_t count = std::min<std::uint64_t>(kChunk, trials - first);
      double s = 0.0;
      double s2 = 0.0;
      for (std::uint64_t t = 0; t < count; ++t) {
        const int y = label_one(rng) ? 1 : 0;
        const int own = y ^ (flip(rng) ? 1 : 0);
        int neighbor_sum = 0;
        for (int j = 0; j < d; ++j) {
          const int truth = same(rng) ? y : 1 - y;
          neighbor_sum += truth ^ (flip(rng) ? 1 : 0);
        }
        const double mean = static_cast<double>(neighbor_sum) / d;
        const double yhat = own + a * (mean - own);
        const double sq = (y - yhat) * (y - yhat);
        s += sq;
        s2 += sq * sq;
      }
      sums[c] = s;
      squares[c] = s2;
    }
  });

  double s = 0.0;
  double s2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sums[c];
    s2 += squares[c];
  }
  const double n = static_cast<double>(trials);
  const double mean = s / n;
  const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), trials};
}

std::vector<GridCell> verify_grid(const Grid& grid, std::uint64_t trials, std::uint64_t seed,
                                  double tolerance_se) {
  std::vector<GridCell> cells;
  std::uint64_t index = 0;
  for (double e : grid.e) {
    for (double p : grid.p) {
      for (int d : grid.degree) {
        for (double a : grid.alpha) {
          GridCell cell;
          cell.params = {e, p, d, a, grid.prior0};
          cell.analytic = denoise_gap(cell.params);
          cell.empirical = monte_carlo_gap(cell.params, trials, seed + 0x100000001b3ULL * ++index);
          cell.pass = std::abs(cell.analytic - cell.empirical.gap) <=
                      tolerance_se * cell.empirical.standard_error;
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

}  // namespace heterolp::theory
