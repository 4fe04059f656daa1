#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

namespace heterolp {

Confidence confidence(const double* row, std::size_t classes) {
  Confidence c;
  double mass = 0.0;
  for (std::size_t k = 0; k < classes; ++k) mass += std::abs(row[k]);
  if (!(mass > 0.0)) return c;
  std::size_t best = 0;
  for (std::size_t k = 1; k < classes; ++k) {
    if (row[k] > row[best]) best = k;
  }
  c.label = static_cast<std::int32_t>(best);
  c.score = std::clamp(row[best] / mass, 0.0, 1.0);
  return c;
}

SelectionStrategy parse_selection_strategy(std::string_view name) {
  if (name == "ratio") return SelectionStrategy::kRatio;
  if (name == "threshold") return SelectionStrategy::kThreshold;
  if (name == "absolute") return SelectionStrategy::kAbsolute;
  fail(ErrorCode::kInvalidArgument, "unknown selection strategy '" + std::string(name) +
                                        "' (expected ratio, threshold or absolute)");
}

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kRatio: return "ratio";
    case SelectionStrategy::kThreshold: return "threshold";
    default: return "absolute";
  }
}

void SelectionConfig::validate() const {
  require(rounds >= 1, "selection: rounds must be at least 1");
  switch (strategy) {
    case SelectionStrategy::kRatio:
      require(epsilon_ratio > 0.0 && epsilon_ratio <= 1.0, "selection: ratio must lie in (0, 1]");
      break;
    case SelectionStrategy::kThreshold:
      require(threshold > 0.0 && threshold < 1.0, "selection: threshold must lie in (0, 1)");
      break;
    case SelectionStrategy::kAbsolute:
      require(absolute_count >= 1, "selection: absolute count must be at least 1");
      break;
  }
}

Selection select_confident(const Mat& f, const NodeList& noisy, const SelectionConfig& config) {
  config.validate();
  require(!noisy.empty(), "select_confident: the noisy set is empty");
  const auto classes = static_cast<std::size_t>(f.cols());

  struct Candidate {
    double score;
    NodeId node;
    std::int32_t label;
  };
  std::vector<Candidate> cand;
  cand.reserve(noisy.size());
  for (NodeId v : noisy) {
    require(v < static_cast<std::size_t>(f.rows()), "select_confident: node id outside F");
    const Confidence c = confidence(f.row(v).data(), classes);
    if (c.label == kUnlabeled) continue;
    if (config.strategy == SelectionStrategy::kThreshold && !(c.score > config.threshold)) continue;
    cand.push_back({c.score, v, c.label});
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return a.score != b.score ? a.score > b.score : a.node < b.node;
  });

  std::size_t take = cand.size();
  if (config.strategy == SelectionStrategy::kRatio) {
    const double want = std::ceil(config.epsilon_ratio * static_cast<double>(noisy.size()) - 1e-9);
    take = std::max<std::size_t>(1, static_cast<std::size_t>(want));
  } else if (config.strategy == SelectionStrategy::kAbsolute) {
    take = config.absolute_count;
  }
  take = std::min(take, cand.size());

  Selection s;
  for (std::size_t k = 0; k < take; ++k) {
    s.nodes.push_back(cand[k].node);
    s.labels.push_back(cand[k].label);
  }
  return s;
}

std::string Ablation::variant() const {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(nlp, "nlp");
  add(nz, "nz");
  add(nnl, "nnl");
  add(npl, "npl");
  add(no_clean, "no_clean");
  return out.empty() ? "full" : out;
}

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double accuracy(const Labels& predicted, const Labels& truth, const NodeList& nodes) {
  if (nodes.empty()) return kNotAvailable;
  std::size_t hit = 0;
  for (NodeId v : nodes) hit += predicted[v] == truth[v] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

Mat center_columns(Mat m) {
  if (m.rows() > 0) m.rowwise() -= m.colwise().mean();
  return m;
}

SimilarityOperator build_operator(const Mat& hl, const Mat& h0,
                                  const std::shared_ptr<const HopOperator>& hop,
                                  const PipelineConfig& config) {
  if (config.ablation.nz) {
    const Graph g = reconstruct_similarity(hl, config.recon.epsilon_sim);
    std::vector<double> ones(g.columns().size(), 1.0);
    SparseMatrix m(g.num_nodes(), g.offsets(), g.columns(), std::move(ones));
    return SimilarityOperator::sparse(std::move(m), config.recon.normalize);
  }
  // Centered hidden columns make Z 1 = (b2 / (b1 + b2)) sum_k l_k A^k 1, which
  // is positive, so row normalization is always defined.
  return SimilarityOperator::factored(reconstruct_woodbury(center_columns(hl), h0, hop, config.recon),
                                      config.recon.normalize);
}

PropagationResult propagate(const SimilarityOperator& s, const Mat& f0, const PipelineConfig& config) {
  switch (config.path) {
    case PropagationPath::kIterative: return lp_iterate(s, f0, config.mix.alpha1, config.iterate);
    case PropagationPath::kClosed: return lp_closed_form(s, f0, config.mix.alpha1, config.recon.dense_cap);
    default: return lp_fast(s, f0, config.mix.alpha1);
  }
}

void transfer(const Selection& sel, NodeList& clean, NodeList& noisy, Labels& clean_labels,
              Labels& noisy_labels, Labels& rectified) {
  std::vector<char> moved(clean_labels.size(), 0);
  for (std::size_t k = 0; k < sel.nodes.size(); ++k) {
    const NodeId v = sel.nodes[k];
    clean_labels[v] = sel.labels[k];
    noisy_labels[v] = kUnlabeled;
    rectified[v] = sel.labels[k];
    moved[v] = 1;
    clean.push_back(v);
  }
  std::sort(clean.begin(), clean.end());
  std::erase_if(noisy, [&moved](NodeId v) { return moved[v] != 0; });
}

}  // namespace

PipelineResult run_r2lp(const Graph& graph, const Mat& features, int classes, const Split& split,
                        const Labels& observed, const PipelineConfig& config, const Labels* truth) {
  const std::size_t n = graph.num_nodes();
  require(static_cast<std::size_t>(features.rows()) == n,
          "run_r2lp: feature rows differ from the node count");
  require(observed.size() == n, "run_r2lp: observed label vector differs from the node count");
  require(truth == nullptr || truth->size() == n, "run_r2lp: ground truth differs from the node count");
  require(classes >= 1, "run_r2lp: need at least one class");
  require(is_partition_of(split.partition, n), "run_r2lp: clean/noisy/unlabeled is not a partition");
  config.recon.validate();
  config.mix.validate();
  config.selection.validate();

  PipelineResult result;
  result.variant = config.ablation.variant();
  Stopwatch total;
  Stopwatch clock;

  LPMix mix = config.mix;
  if (config.ablation.nnl) mix = mix.without_noisy();
  if (config.ablation.npl) mix = mix.without_predicted();
  PipelineConfig cfg = config;
  cfg.mix = mix;

  auto adjacency = normalize(graph, Normalization::kSymmetricSelfLoops);
  auto hop = std::make_shared<const HopOperator>(adjacency, config.recon.lambda);
  const Mat h0 = encode_initial(features, adjacency, config.encoder);
  result.times.encode += clock.lap();

  NodeList clean = split.partition.clean;
  NodeList noisy = split.partition.noisy;
  if (config.ablation.no_clean) {
    noisy.insert(noisy.end(), clean.begin(), clean.end());
    std::sort(noisy.begin(), noisy.end());
    clean.clear();
  }
  Labels clean_labels(n, kUnlabeled);
  Labels noisy_labels(n, kUnlabeled);
  for (NodeId v : clean) clean_labels[v] = observed[v];
  for (NodeId v : noisy) noisy_labels[v] = observed[v];
  for (NodeId v : clean) require(observed[v] >= 0 && observed[v] < classes, "run_r2lp: clean label out of range");
  for (NodeId v : noisy) require(observed[v] >= 0 && observed[v] < classes, "run_r2lp: noisy label out of range");
  const NodeList original_noisy = noisy;
  Labels rectified = noisy_labels;

  auto rectification = [&]() {
    return truth ? accuracy(rectified, *truth, original_noisy) : kNotAvailable;
  };

  // HL for the first reconstruction comes from a classifier on the hop operator.
  ClassifierResult cls;
  if (config.ablation.no_clean) {
    cls = train_classifier(h0, *hop, noisy_labels, classes, config.train);
    SelectionConfig boot;
    boot.strategy = SelectionStrategy::kRatio;
    boot.epsilon_ratio = config.bootstrap_fraction;
    const Selection sel = select_confident(cls.probabilities, noisy, boot);
    transfer(sel, clean, noisy, clean_labels, noisy_labels, rectified);
  } else {
    require(!clean.empty(), "run_r2lp: the clean set is empty (use the no_clean ablation)");
    cls = train_classifier(h0, *hop, clean_labels, classes, config.train);
  }
  result.times.train += clock.lap();

  auto warm = [&config](const ClassifierResult& c) {
    return config.warm_start ? std::optional<ClassifierWeights>(c.weights) : std::nullopt;
  };

  const auto view_k = static_cast<std::size_t>(std::max(1.0, std::round(graph.average_degree())));
  for (std::size_t round = 1; round <= config.selection.rounds; ++round) {
    if (noisy.empty()) {
      result.noisy_exhausted = true;
      break;
    }
    const SimilarityOperator s = build_operator(cls.hl, h0, hop, cfg);
    result.times.reconstruct += clock.lap();

    cls = config.train_on_graph
              ? train_classifier(h0, *hop, clean_labels, classes, config.train, warm(cls))
              : train_classifier(h0, s, clean_labels, classes, config.train, warm(cls));
    result.times.train += clock.lap();

    Mat f;
    if (config.ablation.nlp) {
      f = cls.probabilities;
    } else {
      const Mat f0 = init_label_matrix(one_hot(clean_labels, classes), one_hot(noisy_labels, classes),
                                       one_hot(cls.predictions, classes), mix);
      f = propagate(s, f0, cfg).f;
    }
    result.times.propagate += clock.lap();

    const Selection sel = select_confident(f, noisy, config.selection);
    transfer(sel, clean, noisy, clean_labels, noisy_labels, rectified);
    result.times.select += clock.lap();

    RoundReport r;
    r.round = round;
    r.clean_size = clean.size();
    r.noisy_size = noisy.size();
    r.selected = sel.nodes.size();
    if (truth) {
      r.homophily = edge_homophily(top_k_graph(s, view_k), *truth);
      r.rectification_accuracy = rectification();
      r.val_accuracy = accuracy(cls.predictions, *truth, split.val);
    }
    result.reports.push_back(r);
    result.times.evaluate += clock.lap();
  }
  if (noisy.empty() && !original_noisy.empty()) result.noisy_exhausted = true;

  if (config.train_on_graph) {
    cls = train_classifier(h0, *hop, clean_labels, classes, config.train, warm(cls));
  } else {
    const SimilarityOperator s = build_operator(cls.hl, h0, hop, cfg);
    result.times.reconstruct += clock.lap();
    cls = train_classifier(h0, s, clean_labels, classes, config.train, warm(cls));
  }
  result.times.train += clock.lap();

  result.final_clean = clean;
  result.final_labels = clean_labels;
  result.predictions = cls.predictions;
  if (truth) {
    result.test_accuracy = accuracy(cls.predictions, *truth, split.test);
    result.val_accuracy = accuracy(cls.predictions, *truth, split.val);
    result.rectification_accuracy = rectification();
  }
  result.times.evaluate += clock.lap();
  result.times.total = total.lap();
  return result;
}

PipelineResult run_baseline(const Graph& graph, const Mat& features, int classes, const Split& split,
                            const Labels& observed, const PipelineConfig& config, const Labels* truth) {
  Split merged = split;
  auto& p = merged.partition;
  p.clean.insert(p.clean.end(), p.noisy.begin(), p.noisy.end());
  std::sort(p.clean.begin(), p.clean.end());
  p.noisy.clear();
  PipelineConfig cfg = config;
  cfg.ablation = {};
  PipelineResult r = run_r2lp(graph, features, classes, merged, observed, cfg, truth);
  r.variant = "baseline";
  r.noisy_exhausted = false;
  return r;
}

RoundSnapshot reconstruct_and_propagate(const Graph& graph, const Mat& features, int classes,
                                        const NodePartition& partition, const Labels& observed,
                                        const PipelineConfig& config, std::size_t view_k,
                                        bool propagate_labels) {
  const std::size_t n = graph.num_nodes();
  require(static_cast<std::size_t>(features.rows()) == n, "reconstruct: feature rows differ from the node count");
  require(observed.size() == n, "reconstruct: observed label vector differs from the node count");
  require(is_partition_of(partition, n), "reconstruct: clean/noisy/unlabeled is not a partition");
  require(!partition.clean.empty(), "reconstruct: the clean set is empty");
  require(view_k >= 1, "reconstruct: the view needs k >= 1");
  config.recon.validate();
  config.mix.validate();

  auto adjacency = normalize(graph, Normalization::kSymmetricSelfLoops);
  auto hop = std::make_shared<const HopOperator>(adjacency, config.recon.lambda);
  const Mat h0 = encode_initial(features, adjacency, config.encoder);
  Labels clean_labels(n, kUnlabeled);
  Labels noisy_labels(n, kUnlabeled);
  for (NodeId v : partition.clean) clean_labels[v] = observed[v];
  for (NodeId v : partition.noisy) noisy_labels[v] = observed[v];
  for (NodeId v : partition.clean) require(observed[v] >= 0 && observed[v] < classes, "reconstruct: clean label out of range");
  for (NodeId v : partition.noisy) require(observed[v] >= 0 && observed[v] < classes, "reconstruct: noisy label out of range");

  const ClassifierResult cls = train_classifier(h0, *hop, clean_labels, classes, config.train);
  const SimilarityOperator s = build_operator(cls.hl, h0, hop, config);

  RoundSnapshot out;
  out.view = top_k_graph(s, view_k);
  out.classifier_predictions = cls.predictions;
  out.labels = cls.predictions;
  if (propagate_labels) {
    LPMix mix = config.mix;
    if (config.ablation.nnl) mix = mix.without_noisy();
    if (config.ablation.npl) mix = mix.without_predicted();
    PipelineConfig cfg = config;
    cfg.mix = mix;
    const Mat f0 = init_label_matrix(one_hot(clean_labels, classes), one_hot(noisy_labels, classes),
                                     one_hot(cls.predictions, classes), mix);
    PropagationResult r = propagate(s, f0, cfg);
    out.iterations = r.iterations;
    out.residual = r.residual;
    out.f = std::move(r.f);
    out.labels = argmax_rows(out.f);
  }
  return out;
}

}  // namespace heterolp
