#include "reconstruct.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heterolp {

SimilarityNormalization parse_similarity_normalization(std::string_view name) {
  if (name == "none") return SimilarityNormalization::kNone;
  if (name == "row") return SimilarityNormalization::kRow;
  fail(ErrorCode::kInvalidArgument,
       "unknown similarity normalization '" + std::string(name) + "' (expected none or row)");
}

std::string_view to_string(SimilarityNormalization n) {
  return n == SimilarityNormalization::kNone ? "none" : "row";
}

void ReconstructionParams::validate() const {
  require(beta1 >= 0.0 && beta2 >= 0.0, "reconstruction: beta1 and beta2 must be non-negative");
  if (beta1 + beta2 <= 0.0) {
    fail(ErrorCode::kNumeric,
         "reconstruction: singular bracket, beta1 + beta2 must be positive");
  }
  require(gamma >= 0.0 && gamma < 1.0, "reconstruction: gamma must lie in [0, 1)");
  require(!lambda.empty(), "reconstruction: need at least one hop weight");
  double sum = 0.0;
  for (double l : lambda) {
    require(l >= 0.0, "reconstruction: hop weights must be non-negative");
    sum += l;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "reconstruction: hop weights must sum to 1");
}

Graph reconstruct_similarity(const Mat& h, double epsilon_sim) {
  const auto n = static_cast<std::size_t>(h.rows());
  Mat unit = h;
  std::vector<char> usable(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = h.row(i).norm();
    if (!(norm > 0.0)) {
      usable[i] = 0;
      unit.row(i).setZero();
      warn("similarity graph: node " + std::to_string(i) + " has a zero-norm embedding; left isolated");
    } else {
      unit.row(i) /= norm;
    }
  }

  std::vector<Edge> edges;
  constexpr std::size_t kBlock = 512;
  for (std::size_t b = 0; b < n; b += kBlock) {
    const std::size_t e = std::min(n, b + kBlock);
    const Mat cos = unit.middleRows(b, e - b) * unit.transpose();
    for (std::size_t i = b; i < e; ++i) {
      if (!usable[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (usable[j] && 1.0 - cos(i - b, j) < epsilon_sim) {
          edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
        }
      }
    }
  }
  return Graph::from_edges(n, edges);
}

namespace {

void check_embedding_shapes(const Mat& hl, const Mat& h0, std::size_t hop_nodes) {
  require(hl.rows() == h0.rows() && hl.cols() == h0.cols(),
          "reconstruction: H and H0 must have the same shape");
  require(static_cast<std::size_t>(hl.rows()) == hop_nodes,
          "reconstruction: embeddings and adjacency disagree on the node count");
  require(hl.allFinite() && h0.allFinite(), "reconstruction: embeddings must be finite");
}

}  // namespace

Mat reconstruct_closed_form(const Mat& hl, const Mat& h0, const HopOperator& hop,
                            const ReconstructionParams& params) {
  params.validate();
  check_embedding_shapes(hl, h0, hop.num_nodes());
  const auto n = hl.rows();
  if (static_cast<std::size_t>(n) > params.dense_cap) {
    fail(ErrorCode::kCapacity,
         "closed-form reconstruction refuses n = " + std::to_string(n) + " above the dense cap " +
             std::to_string(params.dense_cap) + "; use the factored (woodbury) form");
  }
  const double g = params.gamma;
  const double beta = params.beta1 + params.beta2;

  const Mat hht = hl * hl.transpose();
  Mat numerator = (1.0 - g) * hht - g * (1.0 - g) * (h0 * hl.transpose());
  numerator.noalias() += params.beta2 * hop.apply(Mat::Identity(n, n));

  Mat bracket = (1.0 - g) * (1.0 - g) * hht;
  bracket.diagonal().array() += beta;

  // Z B = N with B symmetric, so Z^T = B^{-1} N^T.
  const Eigen::LLT<Mat> llt(bracket);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNumeric, "closed-form reconstruction: bracket matrix is singular");
  }
  Mat zt = llt.solve(numerator.transpose());
  return zt.transpose();
}

Mat symmetrize_nonneg(const Mat& z) {
  require(z.rows() == z.cols(), "symmetrize_nonneg: matrix must be square");
  const Mat sym = 0.5 * (z + z.transpose());
  return sym.cwiseMax(0.0);
}

FactoredSimilarity::FactoredSimilarity(Mat hl, Mat h0, std::shared_ptr<const HopOperator> hop,
                                       const ReconstructionParams& params)
    : hl_(std::move(hl)), h0_(std::move(h0)), hop_(std::move(hop)) {
  params.validate();
  require(hop_ != nullptr, "factored reconstruction: missing hop operator");
  check_embedding_shapes(hl_, h0_, hop_->num_nodes());
  require(hop_->adjacency().kind == Normalization::kSymmetricSelfLoops,
          "factored reconstruction: hop operator must use symmetric normalization");
  if (static_cast<std::size_t>(hl_.cols()) > params.feat_dim_cap) {
    fail(ErrorCode::kCapacity,
         "factored reconstruction: feat_dim " + std::to_string(hl_.cols()) +
             " exceeds the cap " + std::to_string(params.feat_dim_cap));
  }
  beta_sum_ = params.beta1 + params.beta2;
  beta2_ = params.beta2;
  gamma_ = params.gamma;

  const auto d = hl_.cols();
  const double shrink = 1.0 - gamma_;
  Mat inner = (hl_.transpose() * hl_) / beta_sum_;
  inner.diagonal().array() += 1.0 / (shrink * shrink);
  const Eigen::LLT<Mat> llt(inner);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNumeric, "factored reconstruction: inner feat_dim x feat_dim matrix is singular");
  }
  inner_inverse_ = llt.solve(Mat::Identity(d, d));
}

Mat FactoredSimilarity::apply_bracket_inverse(const Mat& m) const {
  require(m.rows() == hl_.rows(), "factored similarity: operand row count mismatch");
  const Mat projected = inner_inverse_ * (hl_.transpose() * m);
  Mat out = m / beta_sum_;
  out.noalias() -= (1.0 / (beta_sum_ * beta_sum_)) * (hl_ * projected);
  return out;
}

Mat FactoredSimilarity::apply_numerator(const Mat& m) const {
  require(m.rows() == hl_.rows(), "factored similarity: operand row count mismatch");
  const Mat ht_m = hl_.transpose() * m;
  Mat out = beta2_ * hop_->apply(m);
  out.noalias() += hl_ * ((1.0 - gamma_) * ht_m);
  out.noalias() -= h0_ * ((gamma_ * (1.0 - gamma_)) * ht_m);
  return out;
}

Mat FactoredSimilarity::rows(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= num_nodes(), "factored similarity: row range out of bounds");
  const auto n = hl_.rows();
  const auto count = static_cast<Eigen::Index>(end - begin);
  Mat selector = Mat::Zero(n, count);
  for (Eigen::Index j = 0; j < count; ++j) selector(static_cast<Eigen::Index>(begin) + j, j) = 1.0;

  // Rows of Z are columns of Z^T = B^{-1} N^T, and N^T only swaps which
  // embedding sits on the right.
  const auto blk_l = hl_.middleRows(static_cast<Eigen::Index>(begin), count);
  const auto blk_0 = h0_.middleRows(static_cast<Eigen::Index>(begin), count);
  Mat nt = beta2_ * hop_->apply(selector);
  const Mat right = (1.0 - gamma_) * blk_l.transpose() - gamma_ * (1.0 - gamma_) * blk_0.transpose();
  nt.noalias() += hl_ * right;
  return apply_bracket_inverse(nt).transpose();
}

FactoredSimilarity reconstruct_woodbury(const Mat& hl, const Mat& h0,
                                        std::shared_ptr<const HopOperator> hop,
                                        const ReconstructionParams& params) {
  return FactoredSimilarity(hl, h0, std::move(hop), params);
}

SimilarityOperator::SimilarityOperator(Storage z, SimilarityNormalization normalize)
    : z_(std::move(z)) {
  if (normalize == SimilarityNormalization::kNone) return;
  const auto n = static_cast<Eigen::Index>(num_nodes());
  const Mat sums = raw_apply(Mat::Ones(n, 1));
  const double scale = std::max(1.0, sums.cwiseAbs().maxCoeff());
  row_scale_.resize(n);
  std::size_t empty_rows = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = sums(i, 0);
    if (s > 1e-12 * scale) {
      row_scale_[i] = 1.0 / s;
    } else if (s >= -1e-12 * scale) {
      row_scale_[i] = 0.0;
      ++empty_rows;
    } else {
      fail(ErrorCode::kNumeric,
           "row normalization undefined: row " + std::to_string(i) + " of the similarity sums to " +
               std::to_string(s) + " (center the embeddings or use normalization 'none')");
    }
  }
  if (empty_rows > 0) {
    warn("row normalization: " + std::to_string(empty_rows) +
         " similarity rows sum to zero and are left empty");
  }
}

SimilarityOperator SimilarityOperator::dense(Mat z, SimilarityNormalization normalize) {
  require(z.rows() == z.cols(), "dense similarity must be square");
  return SimilarityOperator(Storage(std::in_place_type<Mat>, std::move(z)), normalize);
}

SimilarityOperator SimilarityOperator::factored(FactoredSimilarity z,
                                                SimilarityNormalization normalize) {
  return SimilarityOperator(Storage(std::in_place_type<FactoredSimilarity>, std::move(z)), normalize);
}

SimilarityOperator SimilarityOperator::sparse(SparseMatrix z, SimilarityNormalization normalize) {
  return SimilarityOperator(Storage(std::in_place_type<SparseMatrix>, std::move(z)), normalize);
}

SimilarityForm SimilarityOperator::form() const {
  switch (z_.index()) {
    case 0: return SimilarityForm::kDense;
    case 1: return SimilarityForm::kFactored;
    default: return SimilarityForm::kSparse;
  }
}

std::size_t SimilarityOperator::num_nodes() const {
  return std::visit(
      [](const auto& z) -> std::size_t {
        using T = std::decay_t<decltype(z)>;
        if constexpr (std::is_same_v<T, Mat>) {
          return static_cast<std::size_t>(z.rows());
        } else if constexpr (std::is_same_v<T, FactoredSimilarity>) {
          return z.num_nodes();
        } else {
          return z.size();
        }
      },
      z_);
}

Mat SimilarityOperator::raw_apply(const Mat& m) const {
  require(static_cast<std::size_t>(m.rows()) == num_nodes(),
          "similarity operator: operand row count mismatch");
  return std::visit(
      [&](const auto& z) -> Mat {
        using T = std::decay_t<decltype(z)>;
        if constexpr (std::is_same_v<T, Mat>) {
          return z * m;
        } else if constexpr (std::is_same_v<T, FactoredSimilarity>) {
          return z.apply(m);
        } else {
          return z.multiply(m);
        }
      },
      z_);
}

Mat SimilarityOperator::apply(const Mat& m) const {
  Mat out = raw_apply(m);
  if (row_scale_.size() > 0) out = row_scale_.asDiagonal() * out;
  return out;
}

Mat SimilarityOperator::raw_rows(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= num_nodes(), "similarity operator: row range out of bounds");
  return std::visit(
      [&](const auto& z) -> Mat {
        using T = std::decay_t<decltype(z)>;
        const auto count = static_cast<Eigen::Index>(end - begin);
        if constexpr (std::is_same_v<T, Mat>) {
          return z.middleRows(static_cast<Eigen::Index>(begin), count);
        } else if constexpr (std::is_same_v<T, FactoredSimilarity>) {
          return z.rows(begin, end);
        } else {
          Mat out = Mat::Zero(count, static_cast<Eigen::Index>(z.size()));
          for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t k = z.offsets()[i]; k < z.offsets()[i + 1]; ++k) {
              out(static_cast<Eigen::Index>(i - begin), z.columns()[k]) += z.values()[k];
            }
          }
          return out;
        }
      },
      z_);
}

Mat SimilarityOperator::rows(std::size_t begin, std::size_t end) const {
  Mat out = raw_rows(begin, end);
  if (row_scale_.size() > 0) {
    out = row_scale_.segment(static_cast<Eigen::Index>(begin), out.rows()).asDiagonal() * out;
  }
  return out;
}

Mat SimilarityOperator::to_dense(std::size_t cap) const {
  if (num_nodes() > cap) {
    fail(ErrorCode::kCapacity, "similarity operator: refusing to densify n = " +
                                   std::to_string(num_nodes()) + " above cap " + std::to_string(cap));
  }
  return rows(0, num_nodes());
}

Graph top_k_graph(const SimilarityOperator& s, std::size_t k, std::size_t block) {
  const std::size_t n = s.num_nodes();
  std::vector<Edge> edges;
  if (n < 2 || k == 0) return Graph::from_edges(n, edges);
  k = std::min(k, n - 1);
  edges.reserve(n * k);
  std::vector<NodeId> order(n);
  for (std::size_t b = 0; b < n; b += block) {
    const std::size_t e = std::min(n, b + block);
    const Mat rows = s.rows(b, e);
    for (std::size_t i = b; i < e; ++i) {
      const auto r = rows.row(static_cast<Eigen::Index>(i - b));
      std::iota(order.begin(), order.end(), NodeId{0});
      std::swap(order[i], order[n - 1]);  // exclude the diagonal
      auto better = [&](NodeId a, NodeId c) {
        return r(a) > r(c) || (r(a) == r(c) && a < c);
      };
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                       order.end() - 1, better);
      for (std::size_t t = 0; t < k; ++t) edges.push_back({static_cast<NodeId>(i), order[t]});
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace heterolp
