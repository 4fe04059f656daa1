#pragma once

#include "common.hpp"
#include "graph.hpp"
#include "reconstruct.hpp"

#include <optional>

namespace heterolp {

struct EncoderConfig {
  std::size_t feat_dim = 64;
  std::uint64_t seed = 0;
  // Standardize output columns; zero-variance columns are dropped.
  bool standardize = true;
};

// H0 = tanh([X | A-hat X] W + b) with fixed random W, b drawn from `seed`;
// input columns are standardized first (constant columns become zero).
Mat encode_initial(const Mat& x, const NormalizedAdjacency& adjacency,
                   const EncoderConfig& config);

// Column-wise zero mean and unit variance; columns with variance below
// 1e-24 are dropped with a warning.
Mat standardize_columns(const Mat& m, const char* what = "embedding");

struct TrainConfig {
  double lr = 0.03;
  std::size_t epochs = 200;
  double weight_decay = 5e-4;
  double dropout = 0.0;
  std::uint64_t seed = 0;
};

// HL = tanh(A W1 + b1), logits = HL W2 + b2, where A = S H is the
// aggregated input.
struct ClassifierWeights {
  Mat w1;
  Vec b1;
  Mat w2;
  Vec b2;
};

struct ClassifierResult {
  ClassifierWeights weights;
  Mat probabilities;  // n x c softmax output
  Labels predictions;  // argmax for every node
  Mat hl;             // n x d hidden representation
  std::vector<double> loss_history;  // loss before each epoch, then final
};

ClassifierWeights init_classifier(std::size_t in_dim, int classes, std::uint64_t seed);

// Mean cross-entropy over `nodes` plus (wd/2)(|W1|^2 + |W2|^2). When `grad`
// is non-null it receives the exact gradient.
double classifier_loss(const ClassifierWeights& w, const Mat& aggregated,
                       const NodeList& nodes, const Labels& labels, double weight_decay,
                       ClassifierWeights* grad);

// Full-batch gradient descent on the labeled rows of `aggregated`.
// Classes absent from the labels draw a warning and can never be predicted.
ClassifierResult train_on_aggregated(const Mat& aggregated, const Labels& labels, int classes,
                                     const TrainConfig& config,
                                     const std::optional<ClassifierWeights>& warm_start = std::nullopt);

ClassifierResult train_classifier(const Mat& h, const SimilarityOperator& s, const Labels& labels,
                                  int classes, const TrainConfig& config,
                                  const std::optional<ClassifierWeights>& warm_start = std::nullopt);

ClassifierResult train_classifier(const Mat& h, const HopOperator& s, const Labels& labels,
                                  int classes, const TrainConfig& config,
                                  const std::optional<ClassifierWeights>& warm_start = std::nullopt);

// Forward pass only.
ClassifierResult predict(const ClassifierWeights& w, const Mat& aggregated);

}  // namespace heterolp
