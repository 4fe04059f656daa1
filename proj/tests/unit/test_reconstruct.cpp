#include <doctest.h>

#include "fixtures.hpp"
#include "reconstruct.hpp"

#include <algorithm>
#include <numeric>
#include <set>

using namespace heterolp;
using fixture::graph_of;
using fixture::to_dense;
using fixture::to_mat;

namespace {

struct Instance {
  int n;
  std::vector<std::pair<int, int>> edges;
  oracle::Dense h, h0, p;
  ReconstructionParams params;
};

Instance random_instance(std::mt19937_64& rng, int n, int d) {
  Instance in;
  in.n = n;
  in.edges = oracle::random_edges(n, 4.0 / n, rng);
  in.h = oracle::random_matrix(n, d, rng);
  in.h0 = oracle::random_matrix(n, d, rng);
  std::uniform_real_distribution<double> beta(0.1, 10.0), gamma(0.0, 0.9);
  in.params.beta1 = beta(rng);
  in.params.beta2 = beta(rng);
  in.params.gamma = gamma(rng);
  in.params.lambda = {0.6, 0.4};
  in.p = oracle::hop_sum(oracle::sym_normalized(oracle::adjacency(n, in.edges)), in.params.lambda);
  return in;
}

}  // namespace

TEST_CASE("reconstruct: thresholded cosine graph") {
  SUBCASE("eps = 0 gives no edges") {
    Mat h(3, 2);
    h << 1, 0, 1, 0, 0, 1;
    CHECK(reconstruct_similarity(h, 0.0).num_edges() == 0);
  }
  SUBCASE("identical rows connect") {
    Mat h(2, 3);
    h << 1, 2, 3, 1, 2, 3;
    CHECK(reconstruct_similarity(h, 0.1).has_edge(0, 1));
  }
  SUBCASE("random instance equals the brute-force pairwise check") {
    std::mt19937_64 rng(1);
    oracle::Dense h = oracle::random_matrix(20, 4, rng);
    h.row(7).setZero();
    const Graph g = reconstruct_similarity(to_mat(h), 0.3);
    const auto want = oracle::cosine_pairs(h, 0.3);
    const auto got = g.edge_list();
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(static_cast<int>(got[k].u) == want[k].first);
      CHECK(static_cast<int>(got[k].v) == want[k].second);
    }
    CHECK(g.degree(7) == 0);
  }
}

TEST_CASE("reconstruct: closed form with zero embeddings is the scaled hop operator") {
  const auto edges = std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}};
  const Graph g = graph_of(4, edges);
  ReconstructionParams p;
  p.beta1 = 0.7;
  p.beta2 = 1.0;
  p.lambda = {1.0};
  const Mat zero = Mat::Zero(4, 3);
  const auto hop = fixture::hop_of(g, p.lambda);
  const Mat z = reconstruct_closed_form(zero, zero, *hop, p);
  const oracle::Dense want = oracle::sym_normalized(oracle::adjacency(4, edges)) / (p.beta1 + p.beta2);
  CHECK(oracle::max_abs_diff(to_dense(z), want) < 1e-14);

  // The factored form collapses the same way: S v = (b2 / (b1 + b2)) sum_k l_k A^k v.
  const FactoredSimilarity f = reconstruct_woodbury(zero, zero, hop, p);
  const Mat v = Mat::Ones(4, 2);
  const oracle::Dense fv = to_dense(f.apply(v));
  CHECK(oracle::max_abs_diff(fv, want * to_dense(v) * p.beta2) < 1e-14);
}

TEST_CASE("reconstruct: closed form matches the dense normal equations and is stationary") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance in = random_instance(rng, 50, 8);
    const Graph g = graph_of(in.n, in.edges);
    const Mat z = reconstruct_closed_form(to_mat(in.h), to_mat(in.h0), *fixture::hop_of(g, in.params.lambda),
                                          in.params);
    const auto& p = in.params;
    const oracle::Dense want = oracle::closed_form_z(in.h, in.h0, in.p, p.beta1, p.beta2, p.gamma);
    CHECK(oracle::max_abs_diff(to_dense(z), want) < 1e-9);
    const oracle::Dense grad = oracle::objective_gradient(to_dense(z), in.h, in.h0, in.p, p.beta1, p.beta2, p.gamma);
    const oracle::Dense grad0 = oracle::objective_gradient(oracle::Dense::Zero(in.n, in.n), in.h, in.h0, in.p,
                                                           p.beta1, p.beta2, p.gamma);
    CHECK(grad.norm() / grad0.norm() < 1e-6);
  }
}

TEST_CASE("reconstruct: Woodbury product with the identity equals the dense Z") {
  std::mt19937_64 rng(3);
  const Instance in = random_instance(rng, 50, 8);
  const Graph g = graph_of(in.n, in.edges);
  const auto hop = fixture::hop_of(g, in.params.lambda);
  const Mat dense = reconstruct_closed_form(to_mat(in.h), to_mat(in.h0), *hop, in.params);
  const FactoredSimilarity f = reconstruct_woodbury(to_mat(in.h), to_mat(in.h0), hop, in.params);
  CHECK(oracle::max_abs_diff(to_dense(f.apply(Mat::Identity(in.n, in.n))), to_dense(dense)) < 1e-8);
  CHECK(oracle::max_abs_diff(to_dense(f.rows(10, 20)), to_dense(dense.middleRows(10, 10))) < 1e-8);
}

TEST_CASE("reconstruct: permuting the instance permutes Z") {
  std::mt19937_64 rng(4);
  const Instance in = random_instance(rng, 30, 5);
  std::vector<int> perm(in.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> pm(in.n);
  for (int i = 0; i < in.n; ++i) pm.indices()[i] = perm[i];
  std::vector<std::pair<int, int>> pe;
  for (auto [u, v] : in.edges) pe.emplace_back(perm[u], perm[v]);

  const Mat z = reconstruct_closed_form(to_mat(in.h), to_mat(in.h0),
                                        *fixture::hop_of(graph_of(in.n, in.edges), in.params.lambda), in.params);
  const Mat zp = reconstruct_closed_form(to_mat(pm * in.h), to_mat(pm * in.h0),
                                         *fixture::hop_of(graph_of(in.n, pe), in.params.lambda), in.params);
  const oracle::Dense expect = pm * to_dense(z) * pm.transpose();
  CHECK(oracle::max_abs_diff(to_dense(zp), expect) < 1e-10);
}

TEST_CASE("reconstruct: dense cap and parameter validation") {
  ReconstructionParams p;
  p.dense_cap = 10;
  const Graph g = graph_of(20, {{0, 1}});
  const Mat h = Mat::Ones(20, 2);
  CHECK_THROWS_AS(reconstruct_closed_form(h, h, *fixture::hop_of(g, p.lambda), p), Error);
  ReconstructionParams bad;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.lambda = {};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("reconstruct: symmetrize_nonneg") {
  Mat z(2, 2);
  z << 0, -2, 4, 0;
  const Mat s = symmetrize_nonneg(z);
  CHECK(s(0, 1) == 1.0);
  CHECK(s(1, 0) == 1.0);
  CHECK(s(0, 0) == 0.0);

  Mat sym(2, 2);
  sym << 1, 2, 2, 3;
  CHECK(symmetrize_nonneg(sym) == sym);

  std::mt19937_64 rng(5);
  const Mat r = to_mat(oracle::random_matrix(15, 15, rng));
  const Mat out = symmetrize_nonneg(r);
  CHECK((out - out.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.minCoeff() >= 0.0);
}

TEST_CASE("reconstruct: row-normalized operator divides by Z 1") {
  std::mt19937_64 rng(6);
  oracle::Dense z = oracle::random_matrix(12, 12, rng).cwiseAbs();
  const SimilarityOperator s = SimilarityOperator::dense(to_mat(z), SimilarityNormalization::kRow);
  const oracle::Dense want = oracle::row_normalized(z);
  CHECK(oracle::max_abs_diff(to_dense(s.to_dense()), want) < 1e-14);
  const oracle::Dense x = oracle::random_matrix(12, 3, rng);
  CHECK(oracle::max_abs_diff(to_dense(s.apply(to_mat(x))), want * x) < 1e-13);
  CHECK(oracle::max_abs_diff(to_dense(s.rows(3, 7)), want.middleRows(3, 4)) < 1e-14);
}

TEST_CASE("reconstruct: top-k view keeps the k largest off-diagonal entries per row") {
  std::mt19937_64 rng(7);
  const int n = 18;
  const oracle::Dense z = oracle::random_matrix(n, n, rng);
  const SimilarityOperator s = SimilarityOperator::dense(to_mat(z), SimilarityNormalization::kNone);
  const std::size_t k = 3;
  const Graph g = top_k_graph(s, k, 5);

  std::set<std::pair<int, int>> want;
  for (int i = 0; i < n; ++i) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (j != i) cols.push_back(j);
    }
    std::stable_sort(cols.begin(), cols.end(), [&](int a, int b) { return z(i, a) > z(i, b); });
    for (std::size_t t = 0; t < k; ++t) want.insert({std::min(i, cols[t]), std::max(i, cols[t])});
  }
  std::set<std::pair<int, int>> got;
  for (const Edge& e : g.edge_list()) got.insert({static_cast<int>(e.u), static_cast<int>(e.v)});
  CHECK(got == want);
}
