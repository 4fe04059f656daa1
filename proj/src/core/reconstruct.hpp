#pragma once

#include "common.hpp"
#include "graph.hpp"

#include <memory>
#include <string_view>
#include <variant>

namespace heterolp {

enum class SimilarityNormalization { kNone, kRow };

SimilarityNormalization parse_similarity_normalization(std::string_view name);
std::string_view to_string(SimilarityNormalization n);

struct ReconstructionParams {
  double beta1 = 1.0;
  double beta2 = 1000.0;
  // Weight of the initial embeddings; must stay below 1.
  double gamma = 0.1;
  // Hop weights lambda_1..lambda_K; K is the vector length.
  std::vector<double> lambda = {0.5, 0.5};
  // Cosine-distance threshold of the thresholded similarity graph.
  double epsilon_sim = 0.3;
  SimilarityNormalization normalize = SimilarityNormalization::kRow;
  std::size_t dense_cap = 5000;
  std::size_t feat_dim_cap = 512;

  int hops() const { return static_cast<int>(lambda.size()); }
  void validate() const;
};

// Thresholded cosine-similarity graph: edge iff 1 - cos(h_i, h_j) < eps.
// Zero-norm rows are left isolated.
Graph reconstruct_similarity(const Mat& h, double epsilon_sim);

// Dense coefficient matrix minimizing
//   ||H - (1-g) Z H - g H0||^2 + b1 ||Z||^2 + b2 ||Z - sum_k l_k A^k||^2
// by a direct n x n Cholesky solve. Guarded by params.dense_cap.
Mat reconstruct_closed_form(const Mat& hl, const Mat& h0, const HopOperator& hop,
                            const ReconstructionParams& params);

// Elementwise max(0, (Z + Z^T) / 2).
Mat symmetrize_nonneg(const Mat& z);

// The same coefficient matrix kept in factored form: the n x n inverse is
// replaced through the Woodbury identity by a feat_dim x feat_dim one, and
// products with Z cost O((nnz(A) K + n d) m) for an n x m operand.
class FactoredSimilarity {
 public:
  FactoredSimilarity(Mat hl, Mat h0, std::shared_ptr<const HopOperator> hop,
                     const ReconstructionParams& params);

  std::size_t num_nodes() const { return static_cast<std::size_t>(hl_.rows()); }
  std::size_t feat_dim() const { return static_cast<std::size_t>(hl_.cols()); }

  // [(1-g)^2 H H^T + (b1+b2) I]^{-1} * m, via the inner d x d inverse.
  Mat apply_bracket_inverse(const Mat& m) const;
  // [(1-g) H H^T + b2 sum_k l_k A^k - g(1-g) H0 H^T] * m, right to left.
  Mat apply_numerator(const Mat& m) const;
  // Z * m.
  Mat apply(const Mat& m) const { return apply_numerator(apply_bracket_inverse(m)); }
  // Rows [begin, end) of Z as a dense (end - begin) x n block.
  Mat rows(std::size_t begin, std::size_t end) const;

  const Mat& inner_inverse() const { return inner_inverse_; }
  const Mat& hl() const { return hl_; }
  const Mat& h0() const { return h0_; }
  const HopOperator& hop() const { return *hop_; }

 private:
  Mat hl_;
  Mat h0_;
  std::shared_ptr<const HopOperator> hop_;
  double beta_sum_;
  double beta2_;
  double gamma_;
  Mat inner_inverse_;
};

FactoredSimilarity reconstruct_woodbury(const Mat& hl, const Mat& h0,
                                        std::shared_ptr<const HopOperator> hop,
                                        const ReconstructionParams& params);

enum class SimilarityForm { kDense, kFactored, kSparse };

// The propagation operator S. Wraps one of the three forms and an optional
// row scaling diag(1 / (Z 1)) for row normalization.
class SimilarityOperator {
 public:
  static SimilarityOperator dense(Mat z, SimilarityNormalization normalize);
  static SimilarityOperator factored(FactoredSimilarity z, SimilarityNormalization normalize);
  static SimilarityOperator sparse(SparseMatrix z, SimilarityNormalization normalize);

  SimilarityForm form() const;
  std::size_t num_nodes() const;

  // S * m.
  Mat apply(const Mat& m) const;
  // Rows [begin, end) of S.
  Mat rows(std::size_t begin, std::size_t end) const;
  // Full S; refuses above `cap` nodes.
  Mat to_dense(std::size_t cap = 5000) const;

  // Empty when unnormalized.
  const Vec& row_scale() const { return row_scale_; }
  const FactoredSimilarity* as_factored() const { return std::get_if<FactoredSimilarity>(&z_); }
  const Mat* as_dense() const { return std::get_if<Mat>(&z_); }

 private:
  using Storage = std::variant<Mat, FactoredSimilarity, SparseMatrix>;
  SimilarityOperator(Storage z, SimilarityNormalization normalize);

  Mat raw_apply(const Mat& m) const;
  Mat raw_rows(std::size_t begin, std::size_t end) const;

  Storage z_;
  Vec row_scale_;
};

// Undirected top-k view of S: each row keeps its k largest off-diagonal
// entries (ties to the smaller column), then the edge set is symmetrized.
Graph top_k_graph(const SimilarityOperator& s, std::size_t k, std::size_t block = 256);

}  // namespace heterolp
