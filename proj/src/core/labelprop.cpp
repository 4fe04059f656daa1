#include "labelprop.hpp"

#include <cmath>
#include <limits>

namespace heterolp {

void LPMix::validate() const {
  for (double a : {alpha1, alpha2, alpha3, alpha4}) {
    require(a >= 0.0 && a <= 1.0, "LPMix: every alpha must lie in [0, 1]");
  }
  require(std::abs(alpha1 + alpha2 + alpha3 + alpha4 - 1.0) <= 1e-12,
          "LPMix: alphas must sum to 1");
}

namespace {

LPMix renormalized(LPMix m) {
  const double sum = m.alpha1 + m.alpha2 + m.alpha3 + m.alpha4;
  require(sum > 0.0, "LPMix: nothing left to renormalize");
  m.alpha1 /= sum;
  m.alpha2 /= sum;
  m.alpha3 /= sum;
  m.alpha4 /= sum;
  return m;
}

}  // namespace

LPMix LPMix::without_noisy() const {
  LPMix m = *this;
  m.alpha3 = 0.0;
  return renormalized(m);
}

LPMix LPMix::without_predicted() const {
  LPMix m = *this;
  m.alpha4 = 0.0;
  return renormalized(m);
}

PropagationPath parse_propagation_path(std::string_view name) {
  if (name == "iterative") return PropagationPath::kIterative;
  if (name == "closed") return PropagationPath::kClosed;
  if (name == "fast") return PropagationPath::kFast;
  fail(ErrorCode::kInvalidArgument, "unknown propagation path '" + std::string(name) +
                                        "' (expected iterative, closed or fast)");
}

std::string_view to_string(PropagationPath path) {
  switch (path) {
    case PropagationPath::kIterative: return "iterative";
    case PropagationPath::kClosed: return "closed";
    default: return "fast";
  }
}

Mat init_label_matrix(const Mat& y_clean, const Mat& y_noisy, const Mat& y_pred, const LPMix& mix) {
  if (y_clean.rows() != y_noisy.rows() || y_clean.rows() != y_pred.rows() ||
      y_clean.cols() != y_noisy.cols() || y_clean.cols() != y_pred.cols()) {
    fail(ErrorCode::kInvalidArgument, "init_label_matrix: label matrices differ in shape");
  }
  return mix.alpha2 * y_clean + mix.alpha3 * y_noisy + mix.alpha4 * y_pred;
}

PropagationResult lp_iterate(const SimilarityOperator& s, const Mat& f0, double alpha1,
                             const IterateOptions& options) {
  require(static_cast<std::size_t>(f0.rows()) == s.num_nodes(),
          "lp_iterate: F0 row count differs from the operator size");
  require(options.t_max >= 1, "lp_iterate: t_max must be at least 1");
  PropagationResult r;
  r.path = PropagationPath::kIterative;
  Mat f = f0;
  double previous = std::numeric_limits<double>::infinity();
  int increases = 0;
  for (std::size_t t = 1; t <= options.t_max; ++t) {
    Mat next = f0;
    if (alpha1 != 0.0) next.noalias() += alpha1 * s.apply(f);
    r.residual = f.size() > 0 ? (next - f).cwiseAbs().maxCoeff() : 0.0;
    f.swap(next);
    r.iterations = t;
    if (!std::isfinite(r.residual)) {
      fail(ErrorCode::kNumeric, "lp_iterate: iterate became non-finite (alpha1 = " +
                                    std::to_string(alpha1) + ")");
    }
    if (r.residual < options.tol) break;
    increases = r.residual > previous ? increases + 1 : 0;
    if (increases >= 10) {
      fail(ErrorCode::kNumeric,
           "lp_iterate: diverging, residual grew for 10 consecutive steps; alpha1 = " +
               std::to_string(alpha1) + " times the spectral bound of S must stay below 1");
    }
    previous = r.residual;
  }
  r.f = std::move(f);
  return r;
}

PropagationResult lp_closed_form(const SimilarityOperator& s, const Mat& f0, double alpha1,
                                 std::size_t dense_cap) {
  require(static_cast<std::size_t>(f0.rows()) == s.num_nodes(),
          "lp_closed_form: F0 row count differs from the operator size");
  PropagationResult r;
  r.path = PropagationPath::kClosed;
  r.iterations = 0;
  if (alpha1 == 0.0) {
    r.f = f0;
    return r;
  }
  const auto n = f0.rows();
  Mat system = -alpha1 * s.to_dense(dense_cap);
  system.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<Mat> lu(system);
  if (!(std::abs(lu.determinant()) > 0.0) || lu.rcond() < 1e-14) {
    fail(ErrorCode::kNumeric, "lp_closed_form: I - alpha1 S is singular");
  }
  r.f = lu.solve(f0);
  r.residual = n > 0 && f0.cols() > 0 ? (system * r.f - f0).cwiseAbs().maxCoeff() : 0.0;
  return r;
}

PropagationResult lp_fast(const SimilarityOperator& s, const Mat& f0, double alpha1) {
  require(static_cast<std::size_t>(f0.rows()) == s.num_nodes(),
          "lp_fast: F0 row count differs from the operator size");
  PropagationResult r;
  r.path = PropagationPath::kFast;
  r.iterations = 1;
  r.f = f0;
  if (alpha1 == 0.0) return r;

  Mat propagated;
  if (const auto* z = s.as_factored()) {
    const Mat q = z->apply_bracket_inverse(f0);
    propagated = z->apply_numerator(q);
    if (s.row_scale().size() > 0) propagated = s.row_scale().asDiagonal() * propagated;
  } else {
    propagated = s.apply(f0);
  }
  r.f.noalias() += alpha1 * propagated;
  return r;
}

Mat classical_lp(const Graph& graph, const Mat& y, double alpha, std::size_t rounds) {
  require(alpha >= 0.0 && alpha <= 1.0, "classical_lp: alpha must lie in [0, 1]");
  require(static_cast<std::size_t>(y.rows()) == graph.num_nodes(),
          "classical_lp: label matrix row count differs from the node count");
  const NormalizedAdjacency mean = normalize(graph, Normalization::kRowStochastic);
  Mat cur = y;
  for (std::size_t r = 0; r < rounds; ++r) {
    Mat next = (1.0 - alpha) * cur;
    if (alpha != 0.0) next.noalias() += alpha * mean.matrix.multiply(cur);
    cur.swap(next);
  }
  return cur;
}

}  // namespace heterolp
