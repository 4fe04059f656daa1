#pragma once

#include "common.hpp"

#include <span>

namespace heterolp {

struct Edge {
  NodeId u;
  NodeId v;
};

// Undirected simple graph in CSR form. Each edge is stored in both rows,
// column indices are sorted within a row, and there are no self-loops.
class Graph {
 public:
  Graph() = default;

  // Symmetrizes the input, drops self-loops and duplicate pairs.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  // Undirected edge count (each {u, v} once).
  std::size_t num_edges() const { return cols_.size() / 2; }
  double average_degree() const;

  std::span<const NodeId> neighbors(NodeId v) const {
    return {cols_.data() + offsets_[v], cols_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Every undirected edge once, with u < v, in row order.
  std::vector<Edge> edge_list() const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& columns() const { return cols_; }

  // Structural check used by tests: sorted rows, no self-loops, A == A^T.
  bool is_symmetric() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
};

// Square CSR matrix with values.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n, std::vector<std::size_t> offsets,
               std::vector<NodeId> cols, std::vector<double> values);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  // y = A * x, x has n rows.
  Mat multiply(const Mat& x) const;
  Vec row_sums() const;
  Mat to_dense() const;

  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& columns() const { return cols_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<double> values_;
};

enum class Normalization {
  kRowStochastic,       // D^{-1} A, no self-loops; isolated rows stay zero
  kSymmetricSelfLoops,  // D^{-1/2} (A + I) D^{-1/2}
};

// The hop operator A-hat together with the normalization it was built with.
struct NormalizedAdjacency {
  SparseMatrix matrix;
  Normalization kind = Normalization::kSymmetricSelfLoops;

  // A-hat^k * x by k repeated sparse products.
  Mat power_apply(const Mat& x, int k) const;
};

NormalizedAdjacency normalize(const Graph& graph, Normalization kind);

// sum_k lambda_k * A-hat^k, applied without forming any power.
class HopOperator {
 public:
  HopOperator(NormalizedAdjacency adjacency, std::vector<double> lambda);

  Mat apply(const Mat& x) const;
  std::size_t num_nodes() const { return adjacency_.matrix.size(); }
  int hops() const { return static_cast<int>(lambda_.size()); }
  const std::vector<double>& lambda() const { return lambda_; }
  const NormalizedAdjacency& adjacency() const { return adjacency_; }

 private:
  NormalizedAdjacency adjacency_;
  std::vector<double> lambda_;
};

// Uniform hop weights 1/K for k = 1..K.
std::vector<double> uniform_hop_weights(int hops);

// Fraction of undirected edges whose endpoints share a label. An edgeless
// graph has homophily 0.
double edge_homophily(const Graph& graph, const Labels& labels);

// Replaces uniformly chosen heterophilous edges with uniformly chosen
// homophilous non-edges until the homophilous edge count reaches
// ceil(target * |E|). The edge count is preserved.
Graph rewire_to_homophily(const Graph& graph, const Labels& labels,
                          double target, Rng& rng);

struct NodePartition {
  NodeList clean;
  NodeList noisy;
  NodeList unlabeled;
};

struct Split {
  NodePartition partition;
  NodeList train;
  NodeList val;
  NodeList test;
};

struct SplitOptions {
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  // Counted against all nodes, not against the training set.
  double clean_fraction = 0.1;
  // Allocate clean slots proportionally to class counts within the
  // training set; requires `labels`.
  bool stratify = false;
  const Labels* labels = nullptr;
};

Split split_nodes(std::size_t num_nodes, Rng& rng, const SplitOptions& options = {});

// Checks that the three sets are disjoint and cover [0, n).
bool is_partition_of(const NodePartition& partition, std::size_t num_nodes);

}  // namespace heterolp
