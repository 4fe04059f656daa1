#include <doctest.h>

#include "oracles.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

#include <cmath>
#include <set>

using namespace heterolp;

namespace {

struct Problem {
  Dataset data;
  Split split;
};

Problem small_problem(std::uint64_t seed, std::size_t n = 240) {
  SBMSpec s;
  s.num_nodes = n;
  s.classes = 2;
  s.p_intra = 0.08;
  s.p_inter = 0.005;
  s.feature_dim = 8;
  s.separation = 2.0;
  s.seed = seed;
  Problem p{generate_sbm(s).dataset, {}};
  Rng rng(seed + 100);
  p.split = split_nodes(n, rng);
  return p;
}

PipelineConfig quick_config() {
  PipelineConfig c;
  c.encoder.feat_dim = 16;
  c.train.epochs = 60;
  c.selection.rounds = 3;
  return c;
}

}  // namespace

TEST_CASE("pipeline: confidence of a label row") {
  const double a[] = {0.2, 0.5, 0.3};
  Confidence c = confidence(a, 3);
  CHECK(c.label == 1);
  CHECK(c.score == doctest::Approx(0.5));

  const double tie[] = {0.4, 0.4, 0.2};
  CHECK(confidence(tie, 3).label == 0);

  const double zero[] = {0.0, 0.0};
  c = confidence(zero, 2);
  CHECK(c.label == kUnlabeled);
  CHECK(c.score == 0.0);

  const double scaled[] = {2.0, 6.0, 2.0};
  CHECK(confidence(scaled, 3).score == doctest::Approx(0.6));

  const double negative[] = {-1.0, -3.0};
  CHECK(confidence(negative, 2).score == 0.0);
}

TEST_CASE("pipeline: ratio selection takes the ceiling, at least one") {
  std::mt19937_64 rng(1);
  const Mat f = Mat(oracle::random_matrix(20, 3, rng).cwiseAbs());
  NodeList noisy;
  for (NodeId v = 0; v < 10; ++v) noisy.push_back(v * 2);

  SelectionConfig cfg;
  cfg.epsilon_ratio = 1.0;
  CHECK(select_confident(f, noisy, cfg).nodes.size() == 10);
  cfg.epsilon_ratio = 0.3;
  const Selection s = select_confident(f, noisy, cfg);
  CHECK(s.nodes.size() == 3);
  cfg.epsilon_ratio = 0.01;
  CHECK(select_confident(f, noisy, cfg).nodes.size() == 1);

  // The three chosen nodes have the highest scores among the noisy set.
  std::vector<std::pair<double, NodeId>> ranked;
  for (NodeId v : noisy) ranked.push_back({-confidence(f.row(v).data(), 3).score, v});
  std::sort(ranked.begin(), ranked.end());
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.nodes[k] == ranked[k].second);
    CHECK(s.labels[k] == confidence(f.row(s.nodes[k]).data(), 3).label);
  }
}

TEST_CASE("pipeline: threshold and absolute selection against brute force") {
  std::mt19937_64 rng(2);
  const Mat f = Mat(oracle::random_matrix(50, 4, rng).cwiseAbs());
  NodeList noisy(50);
  std::iota(noisy.begin(), noisy.end(), 0);

  SelectionConfig cfg;
  cfg.strategy = SelectionStrategy::kThreshold;
  cfg.threshold = 0.4;
  std::set<NodeId> want;
  for (NodeId v = 0; v < 50; ++v) {
    const auto row = f.row(v);
    if (row.maxCoeff() / row.sum() > 0.4) want.insert(v);
  }
  const Selection s = select_confident(f, noisy, cfg);
  CHECK(std::set<NodeId>(s.nodes.begin(), s.nodes.end()) == want);

  cfg.strategy = SelectionStrategy::kAbsolute;
  cfg.absolute_count = 7;
  CHECK(select_confident(f, noisy, cfg).nodes.size() == 7);
  cfg.absolute_count = 500;
  CHECK(select_confident(f, noisy, cfg).nodes.size() == 50);
}

TEST_CASE("pipeline: one full round on clean data rectifies everything") {
  const Problem p = small_problem(3);
  PipelineConfig cfg = quick_config();
  cfg.selection.rounds = 1;
  cfg.selection.epsilon_ratio = 1.0;
  const PipelineResult r = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, cfg, &p.data.labels);
  REQUIRE(r.reports.size() == 1);
  CHECK(r.reports[0].selected == p.split.partition.noisy.size());
  CHECK(r.reports[0].noisy_size == 0);
  CHECK(r.rectification_accuracy == 1.0);
  CHECK(r.noisy_exhausted);
}

TEST_CASE("pipeline: nodes are conserved across rounds") {
  const Problem p = small_problem(4);
  Labels observed = p.data.labels;
  Rng rng(9);
  std::bernoulli_distribution flip(0.3);
  for (NodeId v : p.split.partition.noisy) {
    if (flip(rng)) observed[v] = 1 - observed[v];
  }
  PipelineConfig cfg = quick_config();
  cfg.selection.epsilon_ratio = 0.25;
  const PipelineResult r = run_r2lp(p.data.graph, p.data.features, 2, p.split, observed, cfg, &p.data.labels);
  const std::size_t labeled = p.split.partition.clean.size() + p.split.partition.noisy.size();
  std::size_t noisy = p.split.partition.noisy.size();
  for (const RoundReport& rep : r.reports) {
    CHECK(rep.clean_size + rep.noisy_size == labeled);
    CHECK(rep.selected == static_cast<std::size_t>(std::ceil(0.25 * noisy)));
    noisy -= rep.selected;
    CHECK(rep.noisy_size == noisy);
    CHECK(rep.rectification_accuracy >= 0.0);
    CHECK(rep.rectification_accuracy <= 1.0);
  }
  CHECK(r.final_clean.size() == labeled - noisy);
  for (NodeId v : r.final_clean) CHECK(r.final_labels[v] != kUnlabeled);
}

TEST_CASE("pipeline: the nnl and npl flags equal explicitly renormalized mixes") {
  const Problem p = small_problem(5);
  const PipelineConfig base = quick_config();

  PipelineConfig flag = base;
  flag.ablation.nnl = true;
  PipelineConfig explicit_mix = base;
  explicit_mix.mix = {0.6 / 0.9, 0.2 / 0.9, 0.0, 0.1 / 0.9};
  const auto a = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, flag, &p.data.labels);
  const auto b = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, explicit_mix, &p.data.labels);
  CHECK(a.final_labels == b.final_labels);
  CHECK(a.variant == "nnl");
  CHECK(b.variant == "full");

  flag = base;
  flag.ablation.npl = true;
  explicit_mix.mix = {0.6 / 0.9, 0.2 / 0.9, 0.1 / 0.9, 0.0};
  const auto c = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, flag, &p.data.labels);
  const auto d = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, explicit_mix, &p.data.labels);
  CHECK(c.final_labels == d.final_labels);
}

TEST_CASE("pipeline: runs are deterministic") {
  const Problem p = small_problem(6);
  const PipelineConfig cfg = quick_config();
  const auto a = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, cfg, &p.data.labels);
  const auto b = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, cfg, &p.data.labels);
  CHECK(a.final_labels == b.final_labels);
  CHECK(a.predictions == b.predictions);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t k = 0; k < a.reports.size(); ++k) {
    CHECK(a.reports[k].homophily == b.reports[k].homophily);
    CHECK(a.reports[k].rectification_accuracy == b.reports[k].rectification_accuracy);
  }
}

TEST_CASE("pipeline: every ablation runs and is named") {
  const Problem p = small_problem(7);
  struct Case {
    Ablation ablation;
    const char* name;
  };
  Ablation nlp, nz, noclean, both;
  nlp.nlp = true;
  nz.nz = true;
  noclean.no_clean = true;
  both.nnl = true;
  both.npl = true;
  for (const Case& c : {Case{{}, "full"}, Case{nlp, "nlp"}, Case{nz, "nz"}, Case{noclean, "no_clean"},
                        Case{both, "nnl+npl"}}) {
    PipelineConfig cfg = quick_config();
    cfg.ablation = c.ablation;
    cfg.recon.epsilon_sim = 0.5;
    const auto r = run_r2lp(p.data.graph, p.data.features, 2, p.split, p.data.labels, cfg, &p.data.labels);
    CHECK(r.variant == c.name);
    CHECK(r.test_accuracy >= 0.0);
  }
  const auto b = run_baseline(p.data.graph, p.data.features, 2, p.split, p.data.labels, quick_config(), &p.data.labels);
  CHECK(b.variant == "baseline");
  CHECK(b.reports.empty());
}

TEST_CASE("pipeline: invalid inputs are rejected") {
  const Problem p = small_problem(8);
  PipelineConfig cfg = quick_config();
  Labels bad = p.data.labels;
  bad[p.split.partition.clean[0]] = 5;
  CHECK_THROWS_AS(run_r2lp(p.data.graph, p.data.features, 2, p.split, bad, cfg), Error);
  Split broken = p.split;
  broken.partition.noisy.push_back(broken.partition.clean[0]);
  CHECK_THROWS_AS(run_r2lp(p.data.graph, p.data.features, 2, broken, p.data.labels, cfg), Error);
  CHECK_THROWS_AS(parse_selection_strategy("top"), Error);
}
