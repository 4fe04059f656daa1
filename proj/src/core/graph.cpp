#include "graph.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace heterolp {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<std::pair<NodeId, NodeId>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      fail(ErrorCode::kInvalidArgument,
           "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
               ") references a node outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (e.u == e.v) continue;
    directed.emplace_back(e.u, e.v);
    directed.emplace_back(e.v, e.u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.offsets_.assign(num_nodes + 1, 0);
  g.cols_.resize(directed.size());
  for (std::size_t k = 0; k < directed.size(); ++k) {
    ++g.offsets_[directed[k].first + 1];
    g.cols_[k] = directed[k].second;
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  return g;
}

double Graph::average_degree() const {
  return num_nodes_ == 0 ? 0.0
                         : static_cast<double>(cols_.size()) /
                               static_cast<double>(num_nodes_);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

bool Graph::is_symmetric() const {
  for (NodeId u = 0; u < num_nodes_; ++u) {
    const auto row = neighbors(u);
    if (!std::is_sorted(row.begin(), row.end())) return false;
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) return false;
    for (NodeId v : row) {
      if (v == u || !has_edge(v, u)) return false;
    }
  }
  return true;
}

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> offsets,
                           std::vector<NodeId> cols, std::vector<double> values)
    : n_(n),
      offsets_(std::move(offsets)),
      cols_(std::move(cols)),
      values_(std::move(values)) {
  require(offsets_.size() == n_ + 1, "SparseMatrix: offsets must have n + 1 entries");
  require(cols_.size() == values_.size() && offsets_.back() == cols_.size(),
          "SparseMatrix: column/value arrays disagree with offsets");
}

Mat SparseMatrix::multiply(const Mat& x) const {
  require(static_cast<std::size_t>(x.rows()) == n_,
          "SparseMatrix::multiply: operand has " + std::to_string(x.rows()) +
              " rows, expected " + std::to_string(n_));
  Mat y = Mat::Zero(x.rows(), x.cols());
  parallel_for(n_, 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto out = y.row(static_cast<Eigen::Index>(i));
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        out.noalias() += values_[k] * x.row(cols_[k]);
      }
    }
  });
  return y;
}

Vec SparseMatrix::row_sums() const {
  Vec s = Vec::Zero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s[i] += values_[k];
  }
  return s;
}

Mat SparseMatrix::to_dense() const {
  Mat d = Mat::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, cols_[k]) += values_[k];
  }
  return d;
}

Mat NormalizedAdjacency::power_apply(const Mat& x, int k) const {
  require(k >= 0, "power_apply: negative hop index");
  Mat y = x;
  for (int h = 0; h < k; ++h) y = matrix.multiply(y);
  return y;
}

NormalizedAdjacency normalize(const Graph& graph, Normalization kind) {
  const std::size_t n = graph.num_nodes();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> values;

  if (kind == Normalization::kRowStochastic) {
    cols = graph.columns();
    offsets = graph.offsets();
    values.resize(cols.size());
    for (NodeId i = 0; i < n; ++i) {
      const double d = static_cast<double>(graph.degree(i));
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) values[k] = 1.0 / d;
    }
  } else {
    std::vector<double> inv_sqrt(n);
    for (NodeId i = 0; i < n; ++i) {
      inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(graph.degree(i) + 1));
    }
    cols.reserve(graph.columns().size() + n);
    values.reserve(graph.columns().size() + n);
    for (NodeId i = 0; i < n; ++i) {
      bool self_done = false;
      for (NodeId j : graph.neighbors(i)) {
        if (!self_done && j > i) {
          cols.push_back(i);
          values.push_back(inv_sqrt[i] * inv_sqrt[i]);
          self_done = true;
        }
        cols.push_back(j);
        values.push_back(inv_sqrt[i] * inv_sqrt[j]);
      }
      if (!self_done) {
        cols.push_back(i);
        values.push_back(inv_sqrt[i] * inv_sqrt[i]);
      }
      offsets[i + 1] = cols.size();
    }
  }
  return {SparseMatrix(n, std::move(offsets), std::move(cols), std::move(values)), kind};
}

HopOperator::HopOperator(NormalizedAdjacency adjacency, std::vector<double> lambda)
    : adjacency_(std::move(adjacency)), lambda_(std::move(lambda)) {
  require(!lambda_.empty(), "HopOperator: need at least one hop weight");
  for (double l : lambda_) require(l >= 0.0, "HopOperator: hop weights must be non-negative");
}

Mat HopOperator::apply(const Mat& x) const {
  Mat power = x;
  Mat acc = Mat::Zero(x.rows(), x.cols());
  for (double l : lambda_) {
    power = adjacency_.matrix.multiply(power);
    acc.noalias() += l * power;
  }
  return acc;
}

std::vector<double> uniform_hop_weights(int hops) {
  require(hops >= 1, "hop count must be at least 1");
  return std::vector<double>(static_cast<std::size_t>(hops), 1.0 / hops);
}

namespace {

void require_complete(const Labels& labels, std::size_t n) {
  if (labels.size() != n) {
    fail(ErrorCode::kInvalidArgument,
         "labels incomplete: " + std::to_string(labels.size()) + " labels for " +
             std::to_string(n) + " nodes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0) {
      fail(ErrorCode::kInvalidArgument,
           "labels incomplete: node " + std::to_string(i) + " is unlabeled");
    }
  }
}

std::size_t count_homophilous(const Graph& graph, const Labels& labels) {
  std::size_t same = 0;
  for (const auto& e : graph.edge_list()) same += labels[e.u] == labels[e.v];
  return same;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

double edge_homophily(const Graph& graph, const Labels& labels) {
  require_complete(labels, graph.num_nodes());
  if (graph.num_edges() == 0) return 0.0;
  return static_cast<double>(count_homophilous(graph, labels)) /
         static_cast<double>(graph.num_edges());
}

Graph rewire_to_homophily(const Graph& graph, const Labels& labels, double target,
                          Rng& rng) {
  require_complete(labels, graph.num_nodes());
  require(target >= 0.0 && target <= 1.0, "rewire_to_homophily: target must lie in [0, 1]");

  const std::size_t m = graph.num_edges();
  if (m == 0) return graph;
  const std::size_t hom = count_homophilous(graph, labels);
  const double current = static_cast<double>(hom) / static_cast<double>(m);
  if (target < current - 1e-12) {
    fail(ErrorCode::kInvalidArgument,
         "rewire_to_homophily only increases homophily: target " +
             std::to_string(target) + " is below current " + std::to_string(current));
  }
  const auto needed = static_cast<std::size_t>(
      std::ceil(target * static_cast<double>(m) - 1e-9));
  if (needed <= hom) return graph;

  // Same-class pairs that are not yet edges bound what can be inserted.
  std::vector<NodeList> members;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    const auto c = static_cast<std::size_t>(labels[v]);
    if (members.size() <= c) members.resize(c + 1);
    members[c].push_back(v);
  }
  std::vector<double> class_pairs(members.size());
  double total_pairs = 0.0;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const double s = static_cast<double>(members[c].size());
    class_pairs[c] = s * (s - 1.0) / 2.0;
    total_pairs += class_pairs[c];
  }
  const double free_pairs = total_pairs - static_cast<double>(hom);
  const std::size_t to_add = needed - hom;
  if (static_cast<double>(to_add) > free_pairs) {
    const double best = (static_cast<double>(hom) + std::min(free_pairs, static_cast<double>(m - hom))) /
                        static_cast<double>(m);
    fail(ErrorCode::kInvalidArgument,
         "rewire_to_homophily: target " + std::to_string(target) +
             " unreachable; achievable maximum is " + std::to_string(best));
  }

  std::vector<Edge> kept;
  std::vector<Edge> hetero;
  for (const auto& e : graph.edge_list()) {
    (labels[e.u] == labels[e.v] ? kept : hetero).push_back(e);
  }
  std::shuffle(hetero.begin(), hetero.end(), rng);
  kept.insert(kept.end(), hetero.begin() + static_cast<std::ptrdiff_t>(to_add), hetero.end());

  std::vector<Edge> added;
  added.reserve(to_add);
  if (free_pairs <= 8.0 * static_cast<double>(to_add) && total_pairs <= 5e7) {
    // Near saturation: enumerate the free pairs and draw without replacement.
    std::vector<Edge> candidates;
    candidates.reserve(static_cast<std::size_t>(free_pairs));
    for (const auto& group : members) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
          if (!graph.has_edge(group[a], group[b])) candidates.push_back({group[a], group[b]});
        }
      }
    }
    for (std::size_t k = 0; k < to_add; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
      std::swap(candidates[k], candidates[pick(rng)]);
      added.push_back(candidates[k]);
    }
  } else {
    std::discrete_distribution<std::size_t> pick_class(class_pairs.begin(), class_pairs.end());
    std::unordered_set<std::uint64_t> seen;
    while (added.size() < to_add) {
      const auto& group = members[pick_class(rng)];
      std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
      const NodeId a = group[pick(rng)];
      const NodeId b = group[pick(rng)];
      if (a == b || graph.has_edge(a, b)) continue;
      if (!seen.insert(pair_key(a, b)).second) continue;
      added.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  kept.insert(kept.end(), added.begin(), added.end());
  return Graph::from_edges(graph.num_nodes(), kept);
}

namespace {

std::size_t fraction_of(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

Split split_nodes(std::size_t num_nodes, Rng& rng, const SplitOptions& options) {
  require(num_nodes >= 10, "split_nodes: need at least 10 nodes");
  require(options.train_fraction > 0 && options.val_fraction >= 0 &&
              options.train_fraction + options.val_fraction <= 1.0,
          "split_nodes: invalid train/val fractions");
  const std::size_t n_train = fraction_of(options.train_fraction, num_nodes);
  const std::size_t n_val = fraction_of(options.val_fraction, num_nodes);
  const std::size_t n_clean = fraction_of(options.clean_fraction, num_nodes);
  require(n_clean <= n_train, "split_nodes: clean fraction exceeds the training set");

  NodeList perm(num_nodes);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());

  std::vector<char> is_clean(num_nodes, 0);
  if (!options.stratify) {
    for (std::size_t k = 0; k < n_clean; ++k) is_clean[s.train[k]] = 1;
  } else {
    require(options.labels != nullptr && options.labels->size() == num_nodes,
            "split_nodes: stratified clean sampling needs labels for every node");
    const Labels& y = *options.labels;
    std::vector<NodeList> by_class;
    for (NodeId v : s.train) {
      require(y[v] >= 0, "split_nodes: stratified sampling needs labels for training nodes");
      if (by_class.size() <= static_cast<std::size_t>(y[v])) by_class.resize(y[v] + 1);
      by_class[y[v]].push_back(v);
    }
    // Largest-remainder apportionment of the clean slots.
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double exact = static_cast<double>(n_clean) * by_class[c].size() / n_train;
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(-(exact - std::floor(exact)), c);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < n_clean; ++k, ++assigned) ++quota[remainders[k].second];
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      for (std::size_t k = 0; k < quota[c]; ++k) is_clean[by_class[c][k]] = 1;
    }
  }

  for (NodeId v : s.train) (is_clean[v] ? s.partition.clean : s.partition.noisy).push_back(v);
  s.partition.unlabeled.insert(s.partition.unlabeled.end(), s.val.begin(), s.val.end());
  s.partition.unlabeled.insert(s.partition.unlabeled.end(), s.test.begin(), s.test.end());
  for (NodeList* list : {&s.train, &s.val, &s.test, &s.partition.clean, &s.partition.noisy,
                         &s.partition.unlabeled}) {
    std::sort(list->begin(), list->end());
  }
  return s;
}

bool is_partition_of(const NodePartition& partition, std::size_t num_nodes) {
  std::vector<int> seen(num_nodes, 0);
  for (const NodeList* list : {&partition.clean, &partition.noisy, &partition.unlabeled}) {
    for (NodeId v : *list) {
      if (v >= num_nodes || seen[v]++) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

}  // namespace heterolp
