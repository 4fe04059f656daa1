#include "embeddings.hpp"

#include <cmath>

namespace heterolp {

Mat standardize_columns(const Mat& m, const char* what) {
  const auto n = m.rows();
  std::vector<Eigen::Index> keep;
  Vec mean(m.cols());
  Vec stddev(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    mean[j] = n > 0 ? m.col(j).mean() : 0.0;
    const double var = n > 0 ? (m.col(j).array() - mean[j]).square().mean() : 0.0;
    stddev[j] = std::sqrt(var);
    if (var > 1e-24) keep.push_back(j);
  }
  if (static_cast<Eigen::Index>(keep.size()) < m.cols()) {
    warn(std::string(what) + ": dropped " + std::to_string(m.cols() - keep.size()) +
         " zero-variance column(s)");
  }
  Mat out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto j = keep[k];
    out.col(static_cast<Eigen::Index>(k)) = (m.col(j).array() - mean[j]) / stddev[j];
  }
  return out;
}

Mat encode_initial(const Mat& x, const NormalizedAdjacency& adjacency,
                   const EncoderConfig& config) {
  require(static_cast<std::size_t>(x.rows()) == adjacency.matrix.size(),
          "encode_initial: features and adjacency disagree on the node count");
  require(x.allFinite(), "encode_initial: features must be finite");
  require(config.feat_dim >= 1, "encode_initial: feat_dim must be positive");
  const auto n = x.rows();
  const auto f = x.cols();

  Mat input(n, 2 * f);
  input.leftCols(f) = x;
  input.rightCols(f) = adjacency.matrix.multiply(x);
  for (Eigen::Index j = 0; j < input.cols(); ++j) {
    const double mean = input.col(j).mean();
    const double var = (input.col(j).array() - mean).square().mean();
    if (var > 1e-24) {
      input.col(j) = (input.col(j).array() - mean) / std::sqrt(var);
    } else {
      input.col(j).setZero();
    }
  }

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(config.feat_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, 2 * f)));
  Mat w(2 * f, d);
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) w(i, j) = scale * normal(rng);
  Vec b(d);
  for (Eigen::Index j = 0; j < d; ++j) b[j] = 0.5 * normal(rng);

  Mat h = input * w;
  h.rowwise() += b.transpose();
  h = h.array().tanh().matrix();
  return config.standardize ? standardize_columns(h, "encode_initial") : h;
}

ClassifierWeights init_classifier(std::size_t in_dim, int classes, std::uint64_t seed) {
  require(in_dim >= 1 && classes >= 1, "init_classifier: empty dimensions");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(in_dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(in_dim));
  ClassifierWeights w;
  w.w1.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) w.w1(i, j) = s * normal(rng);
  w.b1 = Vec::Zero(d);
  w.w2.resize(d, classes);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < classes; ++j) w.w2(i, j) = s * normal(rng);
  w.b2 = Vec::Zero(classes);
  return w;
}

namespace {

void softmax_rows(Mat& logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto r = logits.row(i);
    const double mx = r.maxCoeff();
    r = (r.array() - mx).exp().matrix();
    r /= r.sum();
  }
}

// Loss and gradient on the gathered labeled rows; `keep` is the inverted
// dropout mask on the hidden layer (already divided by 1 - p), or null.
double loss_and_grad(const ClassifierWeights& w, const Mat& a, const std::vector<int>& y,
                     double weight_decay, const Mat* keep, ClassifierWeights* grad) {
  const auto m = a.rows();
  Mat z1 = a * w.w1;
  z1.rowwise() += w.b1.transpose();
  const Mat hl = z1.array().tanh().matrix();
  const Mat hd = keep ? Mat(hl.cwiseProduct(*keep)) : hl;
  Mat p = hd * w.w2;
  p.rowwise() += w.b2.transpose();
  softmax_rows(p);

  double loss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) loss -= std::log(std::max(p(i, y[i]), 1e-300));
  loss /= static_cast<double>(m);
  loss += 0.5 * weight_decay * (w.w1.squaredNorm() + w.w2.squaredNorm());

  if (grad) {
    Mat g = p;
    for (Eigen::Index i = 0; i < m; ++i) g(i, y[i]) -= 1.0;
    g /= static_cast<double>(m);
    grad->w2 = hd.transpose() * g + weight_decay * w.w2;
    grad->b2 = g.colwise().sum().transpose();
    Mat dh = g * w.w2.transpose();
    if (keep) dh = dh.cwiseProduct(*keep);
    const Mat dz = dh.cwiseProduct((1.0 - hl.array().square()).matrix());
    grad->w1 = a.transpose() * dz + weight_decay * w.w1;
    grad->b1 = dz.colwise().sum().transpose();
  }
  return loss;
}

void gather(const Mat& aggregated, const NodeList& nodes, const Labels& labels, Mat& a,
            std::vector<int>& y) {
  a.resize(static_cast<Eigen::Index>(nodes.size()), aggregated.cols());
  y.resize(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    a.row(static_cast<Eigen::Index>(k)) = aggregated.row(nodes[k]);
    y[k] = labels[nodes[k]];
  }
}

}  // namespace

double classifier_loss(const ClassifierWeights& w, const Mat& aggregated, const NodeList& nodes,
                       const Labels& labels, double weight_decay, ClassifierWeights* grad) {
  require(!nodes.empty(), "classifier_loss: no labeled nodes");
  Mat a;
  std::vector<int> y;
  gather(aggregated, nodes, labels, a, y);
  return loss_and_grad(w, a, y, weight_decay, nullptr, grad);
}

ClassifierResult predict(const ClassifierWeights& w, const Mat& aggregated) {
  ClassifierResult r;
  r.weights = w;
  Mat z1 = aggregated * w.w1;
  z1.rowwise() += w.b1.transpose();
  r.hl = z1.array().tanh().matrix();
  r.probabilities = r.hl * w.w2;
  r.probabilities.rowwise() += w.b2.transpose();
  softmax_rows(r.probabilities);
  r.predictions = argmax_rows(r.probabilities);
  return r;
}

ClassifierResult train_on_aggregated(const Mat& aggregated, const Labels& labels, int classes,
                                     const TrainConfig& config,
                                     const std::optional<ClassifierWeights>& warm_start) {
  require(static_cast<std::size_t>(aggregated.rows()) == labels.size(),
          "train_classifier: label vector length differs from the node count");
  require(aggregated.allFinite(), "train_classifier: aggregated input must be finite");
  require(config.lr > 0.0, "train_classifier: learning rate must be positive");
  require(config.dropout >= 0.0 && config.dropout < 1.0, "train_classifier: dropout must lie in [0, 1)");

  NodeList nodes;
  std::vector<char> present(static_cast<std::size_t>(classes), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnlabeled) continue;
    require(labels[i] >= 0 && labels[i] < classes, "train_classifier: label outside the class range");
    nodes.push_back(static_cast<NodeId>(i));
    present[labels[i]] = 1;
  }
  require(!nodes.empty(), "train_classifier: the clean set is empty");
  for (int c = 0; c < classes; ++c) {
    if (!present[c]) {
      warn("train_classifier: class " + std::to_string(c) +
           " has no labeled node and can never be predicted");
    }
  }

  ClassifierWeights w = warm_start ? *warm_start
                                   : init_classifier(static_cast<std::size_t>(aggregated.cols()),
                                                     classes, config.seed);
  require(w.w1.rows() == aggregated.cols() && w.w2.cols() == classes,
          "train_classifier: warm-start weights have the wrong shape");

  Mat a;
  std::vector<int> y;
  gather(aggregated, nodes, labels, a, y);

  Rng rng(config.seed);
  std::bernoulli_distribution drop(config.dropout);
  Mat keep;
  ClassifierWeights g;
  std::vector<double> history;
  history.reserve(config.epochs + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const Mat* mask = nullptr;
    if (config.dropout > 0.0) {
      keep.resize(a.rows(), w.w1.cols());
      for (Eigen::Index i = 0; i < keep.size(); ++i) {
        keep.data()[i] = drop(rng) ? 0.0 : 1.0 / (1.0 - config.dropout);
      }
      mask = &keep;
    }
    history.push_back(loss_and_grad(w, a, y, config.weight_decay, mask, &g));
    w.w1 -= config.lr * g.w1;
    w.b1 -= config.lr * g.b1;
    w.w2 -= config.lr * g.w2;
    w.b2 -= config.lr * g.b2;
  }
  history.push_back(loss_and_grad(w, a, y, config.weight_decay, nullptr, nullptr));

  ClassifierResult r = predict(w, aggregated);
  r.loss_history = std::move(history);
  bool masked = false;
  for (int c = 0; c < classes; ++c) {
    if (!present[c]) {
      r.probabilities.col(c).setZero();
      masked = true;
    }
  }
  if (masked) {
    for (Eigen::Index i = 0; i < r.probabilities.rows(); ++i) {
      r.probabilities.row(i) /= r.probabilities.row(i).sum();
    }
    r.predictions = argmax_rows(r.probabilities);
  }
  return r;
}

ClassifierResult train_classifier(const Mat& h, const SimilarityOperator& s, const Labels& labels,
                                  int classes, const TrainConfig& config,
                                  const std::optional<ClassifierWeights>& warm_start) {
  return train_on_aggregated(s.apply(h), labels, classes, config, warm_start);
}

ClassifierResult train_classifier(const Mat& h, const HopOperator& s, const Labels& labels,
                                  int classes, const TrainConfig& config,
                                  const std::optional<ClassifierWeights>& warm_start) {
  return train_on_aggregated(s.apply(h), labels, classes, config, warm_start);
}

}  // namespace heterolp
