#include <doctest.h>

#include "fixtures.hpp"
#include "graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

using namespace heterolp;
using fixture::graph_of;

TEST_CASE("graph: from_edges symmetrizes, drops loops and duplicates") {
  const Graph g = graph_of(4, {{0, 1}, {1, 0}, {2, 2}, {1, 2}, {1, 2}, {3, 0}});
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 3);
  CHECK(g.is_symmetric());
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(0, 3));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.degree(1) == 2);
  CHECK(g.average_degree() == doctest::Approx(1.5));
}

TEST_CASE("graph: node ids outside the range are rejected") {
  std::vector<Edge> e{{0, 5}};
  CHECK_THROWS_AS(Graph::from_edges(3, e), Error);
}

TEST_CASE("graph: edge homophily on small cases") {
  CHECK(edge_homophily(graph_of(4, {{0, 1}, {1, 2}, {2, 3}}), {0, 1, 0, 1}) == 0.0);
  CHECK(edge_homophily(graph_of(3, {{0, 1}, {1, 2}, {0, 2}}), {2, 2, 2}) == 1.0);
  CHECK(edge_homophily(graph_of(3, {}), {0, 1, 0}) == 0.0);
}

TEST_CASE("graph: edge homophily matches the pair-count oracle and ignores relabeling") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 60;
    const auto edges = oracle::random_edges(n, 0.1, rng);
    std::vector<int> y(n);
    std::uniform_int_distribution<int> cls(0, 3);
    for (int& v : y) v = cls(rng);
    const Graph g = graph_of(n, edges);
    const Labels labels(y.begin(), y.end());
    const double h = edge_homophily(g, labels);
    CHECK(h == doctest::Approx(oracle::homophily(edges, y)).epsilon(1e-15));

    // Permute node ids: edges and labels move together.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> pe;
    for (auto [u, v] : edges) pe.emplace_back(perm[u], perm[v]);
    Labels pl(n);
    for (int v = 0; v < n; ++v) pl[perm[v]] = labels[v];
    CHECK(edge_homophily(graph_of(n, pe), pl) == doctest::Approx(h).epsilon(1e-15));
  }
}

TEST_CASE("graph: symmetric normalization with self-loops matches the dense formula") {
  std::mt19937_64 rng(3);
  const int n = 25;
  const auto edges = oracle::random_edges(n, 0.15, rng);
  const Graph g = graph_of(n, edges);
  const NormalizedAdjacency a = normalize(g, Normalization::kSymmetricSelfLoops);
  const oracle::Dense expect = oracle::sym_normalized(oracle::adjacency(n, edges));
  CHECK(oracle::max_abs_diff(fixture::to_dense(a.matrix.to_dense()), expect) < 1e-14);

  const oracle::Dense x = oracle::random_matrix(n, 3, rng);
  const HopOperator hop(a, {0.3, 0.5, 0.2});
  const oracle::Dense want = oracle::hop_sum(expect, {0.3, 0.5, 0.2}) * x;
  CHECK(oracle::max_abs_diff(fixture::to_dense(hop.apply(fixture::to_mat(x))), want) < 1e-12);
}

TEST_CASE("graph: row-stochastic normalization leaves isolated rows zero") {
  const Graph g = graph_of(3, {{0, 1}});
  const Mat d = normalize(g, Normalization::kRowStochastic).matrix.to_dense();
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 0) == 1.0);
  CHECK(d.row(2).sum() == 0.0);
}

TEST_CASE("graph: rewiring keeps the edge count and only raises homophily") {
  std::mt19937_64 orng(11);
  const int n = 80;
  const auto edges = oracle::random_edges(n, 0.08, orng);
  Labels y(n);
  for (int v = 0; v < n; ++v) y[v] = v % 3;
  const Graph g = graph_of(n, edges);
  const double h0 = edge_homophily(g, y);

  Rng rng(5);
  SUBCASE("target equal to the current value returns the graph unchanged") {
    CHECK(rewire_to_homophily(g, y, h0, rng) == g);
  }
  SUBCASE("intermediate target") {
    const double target = std::min(1.0, h0 + 0.3);
    const Graph r = rewire_to_homophily(g, y, target, rng);
    CHECK(r.num_edges() == g.num_edges());
    CHECK(r.is_symmetric());
    const double h = edge_homophily(r, y);
    CHECK(h >= h0);
    CHECK(h >= target - 1e-12);
    CHECK(h <= target + 1.0 / static_cast<double>(g.num_edges()) + 1e-12);
  }
  SUBCASE("target 1.0") {
    const Graph r = rewire_to_homophily(g, y, 1.0, rng);
    CHECK(r.num_edges() == g.num_edges());
    CHECK(edge_homophily(r, y) == 1.0);
  }
  SUBCASE("lowering is refused") {
    CHECK_THROWS_AS(rewire_to_homophily(g, y, h0 / 2, rng), Error);
  }
}

TEST_CASE("graph: split sizes follow the stated ratios") {
  Rng rng(0);
  const Split s = split_nodes(100, rng);
  CHECK(s.train.size() == 60);
  CHECK(s.val.size() == 20);
  CHECK(s.test.size() == 20);
  CHECK(s.partition.clean.size() == 10);
  CHECK(s.partition.noisy.size() == 50);

  Rng rng2(0);
  const Split cora = split_nodes(2708, rng2);
  CHECK(cora.partition.clean.size() == 2708 / 10);
  CHECK(cora.partition.noisy.size() == 2708 * 6 / 10 - 2708 / 10);
}

TEST_CASE("graph: split is deterministic and a partition for every n") {
  Rng a(42), b(42);
  const Split s1 = split_nodes(500, a);
  const Split s2 = split_nodes(500, b);
  CHECK(s1.partition.clean == s2.partition.clean);
  CHECK(s1.partition.noisy == s2.partition.noisy);
  CHECK(s1.test == s2.test);

  std::mt19937_64 pick(9);
  std::uniform_int_distribution<std::size_t> size(10, 3000);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = size(pick);
    Rng rng(trial);
    const Split s = split_nodes(n, rng);
    CHECK(is_partition_of(s.partition, n));
    std::set<NodeId> unl(s.partition.unlabeled.begin(), s.partition.unlabeled.end());
    std::set<NodeId> vt(s.val.begin(), s.val.end());
    vt.insert(s.test.begin(), s.test.end());
    CHECK(unl == vt);
  }
  Rng rng(1);
  CHECK_THROWS_AS(split_nodes(9, rng), Error);
}

TEST_CASE("graph: stratified clean set follows class proportions") {
  Labels y(1000);
  for (int v = 0; v < 1000; ++v) y[v] = v % 4 == 0 ? 1 : 0;  // 25% class 1
  Rng rng(2);
  SplitOptions o;
  o.stratify = true;
  o.labels = &y;
  const Split s = split_nodes(1000, rng, o);
  std::size_t ones_train = 0;
  for (NodeId v : s.train) ones_train += y[v] == 1;
  std::size_t ones_clean = 0;
  for (NodeId v : s.partition.clean) ones_clean += y[v] == 1;
  const double want = 100.0 * ones_train / s.train.size();
  CHECK(std::abs(static_cast<double>(ones_clean) - want) <= 1.0);
}
