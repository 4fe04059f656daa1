#include "synth.hpp"

#include "parallel.hpp"

#include <cmath>

namespace heterolp {

void SBMSpec::validate() const {
  require(num_nodes >= 1, "SBM: need at least one node");
  require(classes >= 1 && static_cast<std::size_t>(classes) <= num_nodes,
          "SBM: class count must lie in [1, n]");
  require(p_intra >= 0.0 && p_intra <= 1.0 && p_inter >= 0.0 && p_inter <= 1.0,
          "SBM: edge probabilities must lie in [0, 1]");
  require(feature_dim >= 1, "SBM: feature_dim must be positive");
  require(feature_noise >= 0.0, "SBM: feature_noise must be non-negative");
}

namespace {

std::vector<double> block_sizes(const SBMSpec& spec) {
  std::vector<double> sizes(static_cast<std::size_t>(spec.classes), 0.0);
  for (std::size_t v = 0; v < spec.num_nodes; ++v) sizes[v % spec.classes] += 1.0;
  return sizes;
}

// Visits the indices of a Bernoulli(p) sequence of length `total` that came
// up 1, by geometric skipping.
template <typename Fn>
void sample_indices(double total, double p, Rng& rng, Fn&& on_hit) {
  if (p <= 0.0 || total <= 0.0) return;
  if (p >= 1.0) {
    for (double k = 0; k < total; k += 1.0) on_hit(static_cast<std::uint64_t>(k));
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  double k = -1.0;
  for (;;) {
    const double u = 1.0 - unit(rng);  // (0, 1]
    k += 1.0 + std::floor(std::log(u) / log_q);
    if (k >= total) return;
    on_hit(static_cast<std::uint64_t>(k));
  }
}

// Inverse of the row-major enumeration of pairs (a, b), a < b < m.
std::pair<std::uint64_t, std::uint64_t> triangle_pair(std::uint64_t k, std::uint64_t m) {
  // Row a holds m - 1 - a pairs; find a with start(a) <= k < start(a + 1).
  const double mm = static_cast<double>(m);
  auto start = [m](std::uint64_t a) { return a * (2 * m - a - 1) / 2; };
  auto a = static_cast<std::uint64_t>(
      std::floor((2.0 * mm - 1.0 - std::sqrt((2.0 * mm - 1.0) * (2.0 * mm - 1.0) - 8.0 * static_cast<double>(k))) / 2.0));
  while (a > 0 && start(a) > k) --a;
  while (start(a + 1) <= k) ++a;
  const std::uint64_t b = a + 1 + (k - start(a));
  return {a, b};
}

}  // namespace

double sbm_expected_edges(const SBMSpec& spec) {
  const auto sizes = block_sizes(spec);
  double same = 0.0;
  double cross = 0.0;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    same += sizes[a] * (sizes[a] - 1.0) / 2.0;
    for (std::size_t b = a + 1; b < sizes.size(); ++b) cross += sizes[a] * sizes[b];
  }
  return same * spec.p_intra + cross * spec.p_inter;
}

double sbm_expected_homophily(const SBMSpec& spec) {
  const auto sizes = block_sizes(spec);
  double same = 0.0;
  double cross = 0.0;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    same += sizes[a] * (sizes[a] - 1.0) / 2.0;
    for (std::size_t b = a + 1; b < sizes.size(); ++b) cross += sizes[a] * sizes[b];
  }
  const double total = same * spec.p_intra + cross * spec.p_inter;
  return total > 0.0 ? same * spec.p_intra / total : 0.0;
}

SBMSample generate_sbm(const SBMSpec& spec) {
  spec.validate();
  const auto c = static_cast<std::size_t>(spec.classes);
  const std::size_t n = spec.num_nodes;
  Rng rng(spec.seed);

  // Local index i in block a is global node i * c + a.
  const auto sizes = block_sizes(spec);
  auto global = [c](std::uint64_t local, std::size_t block) {
    return static_cast<NodeId>(local * c + block);
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(sbm_expected_edges(spec) * 1.1) + 16);
  for (std::size_t a = 0; a < c; ++a) {
    const auto m = static_cast<std::uint64_t>(sizes[a]);
    sample_indices(sizes[a] * (sizes[a] - 1.0) / 2.0, spec.p_intra, rng, [&](std::uint64_t k) {
      const auto [i, j] = triangle_pair(k, m);
      edges.push_back({global(i, a), global(j, a)});
    });
    for (std::size_t b = a + 1; b < c; ++b) {
      const auto cols = static_cast<std::uint64_t>(sizes[b]);
      sample_indices(sizes[a] * sizes[b], spec.p_inter, rng, [&](std::uint64_t k) {
        edges.push_back({global(k / cols, a), global(k % cols, b)});
      });
    }
  }

  SBMSample out;
  out.dataset.name = "sbm";
  out.dataset.graph = Graph::from_edges(n, edges);
  out.dataset.classes = spec.classes;
  out.dataset.labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) out.dataset.labels[v] = static_cast<std::int32_t>(v % c);

  std::normal_distribution<double> normal(0.0, 1.0);
  const auto f = static_cast<Eigen::Index>(spec.feature_dim);
  out.dataset.features.resize(static_cast<Eigen::Index>(n), f);
  for (std::size_t v = 0; v < n; ++v) {
    for (Eigen::Index j = 0; j < f; ++j) {
      out.dataset.features(v, j) = spec.feature_noise * normal(rng);
    }
    out.dataset.features(v, static_cast<Eigen::Index>((v % c) % spec.feature_dim)) += spec.separation;
  }
  out.expected_homophily = sbm_expected_homophily(spec);
  out.expected_edges = sbm_expected_edges(spec);
  return out;
}

std::vector<SBMSample> generate_scaling_series(const SBMSpec& base,
                                               const std::vector<std::size_t>& sizes) {
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    require(sizes[k] > sizes[k - 1], "scaling series: sizes must be strictly ascending");
  }
  std::vector<SBMSpec> specs;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    SBMSpec s = base;
    const double ratio = static_cast<double>(base.num_nodes - 1) / static_cast<double>(sizes[k] - 1);
    s.num_nodes = sizes[k];
    s.p_intra = std::min(1.0, base.p_intra * ratio);
    s.p_inter = std::min(1.0, base.p_inter * ratio);
    s.seed = base.seed + k;
    specs.push_back(s);
  }
  std::vector<SBMSample> out(specs.size());
  parallel_for(specs.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) out[k] = generate_sbm(specs[k]);
  });
  return out;
}

}  // namespace heterolp
