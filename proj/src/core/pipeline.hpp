#pragma once

#include "common.hpp"
#include "embeddings.hpp"
#include "graph.hpp"
#include "labelprop.hpp"
#include "reconstruct.hpp"

#include <limits>
#include <string>
#include <string_view>

namespace heterolp {

struct Confidence {
  double score = 0.0;            // max entry of the L1-normalized row
  std::int32_t label = kUnlabeled;  // argmax, ties to the smaller class
};

// All-zero rows score 0 with an undefined label; callers skip them.
// Negative entries count by magnitude in the normalizer, so the score of a
// row whose largest entry is not positive is 0.
Confidence confidence(const double* row, std::size_t classes);

enum class SelectionStrategy { kRatio, kThreshold, kAbsolute };

SelectionStrategy parse_selection_strategy(std::string_view name);
std::string_view to_string(SelectionStrategy s);

struct SelectionConfig {
  SelectionStrategy strategy = SelectionStrategy::kRatio;
  double epsilon_ratio = 0.3;
  double threshold = 0.9;
  std::size_t absolute_count = 50;
  std::size_t rounds = 10;

  void validate() const;
};

struct Selection {
  NodeList nodes;    // in selection order (best first)
  Labels labels;     // corrected label per selected node
};

// Picks nodes of `noisy` by the confidence of their rows in `f`.
// ratio: ceil(eps |N|) best (at least one); threshold: every score above the
// threshold; absolute: min(k, |N|) best. Ties go to the smaller node id and
// rows with no mass are never selected.
Selection select_confident(const Mat& f, const NodeList& noisy, const SelectionConfig& config);

struct Ablation {
  bool nlp = false;       // no propagation: select by classifier confidence
  bool nz = false;        // thresholded cosine graph instead of the coefficient matrix
  bool nnl = false;       // drop the noisy-label term
  bool npl = false;       // drop the predicted-label term
  bool no_clean = false;  // bootstrap the clean set from the noisy labels

  // "full", or the active flags joined by '+'.
  std::string variant() const;
};

struct PipelineConfig {
  ReconstructionParams recon;
  LPMix mix;
  SelectionConfig selection;
  TrainConfig train;
  EncoderConfig encoder;
  PropagationPath path = PropagationPath::kFast;
  IterateOptions iterate;
  Ablation ablation;
  // Fraction of the noisy set moved into the clean set by the no-clean bootstrap.
  double bootstrap_fraction = 0.1;
  // Continue training from the previous round's weights instead of a fresh
  // initialization, so the rounds act as the depth of the embedding model.
  bool warm_start = true;
  // Aggregate the classifier input with the hop operator instead of S, so
  // that HL depends on the clean set only and not on the previous round's S.
  bool train_on_graph = true;
};

inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

struct RoundReport {
  std::size_t round = 0;
  std::size_t clean_size = 0;
  std::size_t noisy_size = 0;
  std::size_t selected = 0;
  // Edge homophily of the top-k view of S, k = rounded average input degree.
  double homophily = kNotAvailable;
  // Over the original noisy set: transferred nodes count with their
  // corrected label, the rest with their observed label.
  double rectification_accuracy = kNotAvailable;
  double val_accuracy = kNotAvailable;
};

struct PhaseTimes {
  double encode = 0.0;
  double reconstruct = 0.0;
  double train = 0.0;
  double propagate = 0.0;
  double select = 0.0;
  double evaluate = 0.0;
  double total = 0.0;
};

struct PipelineResult {
  std::string variant;
  std::vector<RoundReport> reports;
  bool noisy_exhausted = false;
  NodeList final_clean;
  Labels final_labels;   // labels of the final clean set, kUnlabeled elsewhere
  Labels predictions;    // final classifier, every node
  double test_accuracy = kNotAvailable;
  double val_accuracy = kNotAvailable;
  double rectification_accuracy = kNotAvailable;
  PhaseTimes times;
};

// Algorithm 1. `observed` carries the clean labels on split.partition.clean
// and the (corrupted) labels on split.partition.noisy; other entries are
// ignored. `truth`, when given, is used for evaluation only.
PipelineResult run_r2lp(const Graph& graph, const Mat& features, int classes, const Split& split,
                        const Labels& observed, const PipelineConfig& config,
                        const Labels* truth = nullptr);

// The same final classifier trained on clean and noisy labels together, with
// no rectification rounds.
PipelineResult run_baseline(const Graph& graph, const Mat& features, int classes, const Split& split,
                            const Labels& observed, const PipelineConfig& config,
                            const Labels* truth = nullptr);

// The first round's operator, built once: HL from a classifier trained on
// the clean labels, S from HL (or the thresholded graph under nz), and, when
// `propagate_labels` is set, F from the configured propagation path. Backs
// the reconstruct and propagate subcommands.
struct RoundSnapshot {
  Graph view;  // top-k view of S
  Mat f;       // empty unless propagated
  Labels labels;  // row argmax of f, or the classifier's predictions
  Labels classifier_predictions;
  std::size_t iterations = 0;
  double residual = 0.0;
};

RoundSnapshot reconstruct_and_propagate(const Graph& graph, const Mat& features, int classes,
                                        const NodePartition& partition, const Labels& observed,
                                        const PipelineConfig& config, std::size_t view_k,
                                        bool propagate_labels);

}  // namespace heterolp
