// Independent reference implementations used as test oracles. Everything is
// dense and written from the defining formulas, never by calling the library
// routine under test.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Dense = Eigen::MatrixXd;

// 0/1 symmetric adjacency without self-loops.
inline Dense adjacency(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  Dense a = Dense::Zero(n, n);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

// D^{-1/2} (A + I) D^{-1/2}.
inline Dense sym_normalized(const Dense& a) {
  const Eigen::Index n = a.rows();
  Dense s = a + Dense::Identity(n, n);
  Eigen::VectorXd d = s.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) /= std::sqrt(d(i) * d(j));
  }
  return s;
}

inline Dense hop_sum(const Dense& ahat, const std::vector<double>& lambda) {
  Dense p = Dense::Zero(ahat.rows(), ahat.cols());
  Dense power = Dense::Identity(ahat.rows(), ahat.cols());
  for (double l : lambda) {
    power = power * ahat;
    p += l * power;
  }
  return p;
}

// Stationary point of
//   ||H - (1-g) Z H - g H0||^2 + b1 ||Z||^2 + b2 ||Z - P||^2:
// Z [(1-g)^2 H H^T + (b1+b2) I] = (1-g) H H^T - g(1-g) H0 H^T + b2 P.
inline Dense closed_form_z(const Dense& h, const Dense& h0, const Dense& p, double b1, double b2, double g) {
  const Eigen::Index n = h.rows();
  const Dense m = (1 - g) * (1 - g) * h * h.transpose() + (b1 + b2) * Dense::Identity(n, n);
  const Dense rhs = (1 - g) * h * h.transpose() - g * (1 - g) * h0 * h.transpose() + b2 * p;
  // Z M = rhs  <=>  M^T Z^T = rhs^T.
  return m.transpose().fullPivLu().solve(rhs.transpose()).transpose();
}

inline double objective(const Dense& z, const Dense& h, const Dense& h0, const Dense& p, double b1, double b2,
                        double g) {
  const Dense r = h - (1 - g) * z * h - g * h0;
  return r.squaredNorm() + b1 * z.squaredNorm() + b2 * (z - p).squaredNorm();
}

inline Dense objective_gradient(const Dense& z, const Dense& h, const Dense& h0, const Dense& p, double b1,
                                double b2, double g) {
  const Dense r = h - (1 - g) * z * h - g * h0;
  return -2 * (1 - g) * r * h.transpose() + 2 * b1 * z + 2 * b2 * (z - p);
}

inline Dense row_normalized(const Dense& z) {
  Dense s = z;
  for (Eigen::Index i = 0; i < s.rows(); ++i) s.row(i) /= z.row(i).sum();
  return s;
}

// Pairs (i < j) with 1 - cos(h_i, h_j) < eps; zero rows never connect.
inline std::vector<std::pair<int, int>> cosine_pairs(const Dense& h, double eps) {
  std::vector<std::pair<int, int>> out;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < h.rows(); ++j) {
      const double ni = h.row(i).norm();
      const double nj = h.row(j).norm();
      if (ni == 0.0 || nj == 0.0) continue;
      const double cos = h.row(i).dot(h.row(j)) / (ni * nj);
      if (1.0 - cos < eps) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

inline double homophily(const std::vector<std::pair<int, int>>& edges, const std::vector<int>& labels) {
  if (edges.empty()) return 0.0;
  std::size_t same = 0;
  for (auto [u, v] : edges) same += labels[u] == labels[v] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(edges.size());
}

// P(sum of the d neighbors' noisy labels = s | Y = y) by enumerating every
// noisy-label vector in {0,1}^d. Each neighbor's probability of a noisy 1
// is itself summed over its true label (same as y w.p. p) and whether the
// flip fired (w.p. e), the double sum before any binomial simplification.
inline std::vector<double> neighbor_sum_enumeration(int d, double p, double e, int y) {
  double one = 0.0;
  for (int truth = 0; truth <= 1; ++truth) {
    const double pt = truth == y ? p : 1.0 - p;
    for (int flipped = 0; flipped <= 1; ++flipped) {
      const double pf = flipped ? e : 1.0 - e;
      if ((truth ^ flipped) == 1) one += pt * pf;
    }
  }
  std::vector<double> pmf(d + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    double prob = 1.0;
    int s = 0;
    for (int j = 0; j < d; ++j) {
      const bool bit = (mask >> j) & 1u;
      prob *= bit ? one : 1.0 - one;
      s += bit ? 1 : 0;
    }
    pmf[s] += prob;
  }
  return pmf;
}

// One round of Y <- (1-a) Y + a * mean of neighbors, from adjacency lists.
inline Dense classical_lp_round(const std::vector<std::vector<int>>& adj, const Dense& y, double a) {
  Dense out = (1 - a) * y;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (adj[i].empty()) continue;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(y.cols());
    for (int j : adj[i]) mean += y.row(j);
    out.row(i) += a * mean / static_cast<double>(adj[i].size());
  }
  return out;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double max_abs_diff(const Dense& a, const Dense& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Random G(n, q) edge list; the oracle side of a shared random instance.
inline std::vector<std::pair<int, int>> random_edges(int n, double q, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(q);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) e.emplace_back(i, j);
    }
  }
  return e;
}

inline Dense random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Dense m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

}  // namespace oracle
