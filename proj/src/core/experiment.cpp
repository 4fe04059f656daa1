#include "experiment.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <set>
#include <sstream>

namespace heterolp {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::kParse, "run config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      fail(ErrorCode::kParse, "run config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void range_warning(const char* name, double v, double lo, double hi) {
  if (v < lo || v > hi) {
    warn(std::string("run config: ") + name + " = " + format_double(v) + " is outside the search range [" +
         format_double(lo) + ", " + format_double(hi) + "]");
  }
}

fs::path absolute_path(const fs::path& p, const fs::path& base) {
  if (p.empty()) return p;
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

json to_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  json flip = nullptr;
  if (c.noise.flip_permutation) flip = *c.noise.flip_permutation;
  return {
      {"dataset", c.dataset.string()},
      {"output_dir", c.output_dir.string()},
      {"compare_baseline", c.compare_baseline},
      {"noise",
       {{"kind", std::string(to_string(c.noise.kind))},
        {"rate", c.noise.rate},
        {"seed", c.noise.seed},
        {"flip_permutation", flip},
        {"randomize_flip", c.noise.randomize_flip}}},
      {"split",
       {{"seed", c.split.seed},
        {"train_fraction", c.split.train_fraction},
        {"val_fraction", c.split.val_fraction},
        {"clean_fraction", c.split.clean_fraction},
        {"stratify", c.split.stratify}}},
      {"reconstruct",
       {{"beta1", p.recon.beta1},
        {"beta2", p.recon.beta2},
        {"gamma", p.recon.gamma},
        {"lambda", p.recon.lambda},
        {"eps", p.recon.epsilon_sim},
        {"normalize_s", std::string(to_string(p.recon.normalize))},
        {"dense_cap", p.recon.dense_cap},
        {"feat_dim_cap", p.recon.feat_dim_cap}}},
      {"propagate",
       {{"path", std::string(to_string(p.path))},
        {"alpha1", p.mix.alpha1},
        {"alpha2", p.mix.alpha2},
        {"alpha3", p.mix.alpha3},
        {"alpha4", p.mix.alpha4},
        {"tol", p.iterate.tol},
        {"tmax", p.iterate.t_max}}},
      {"selection",
       {{"strategy", std::string(to_string(p.selection.strategy))},
        {"epsilon", p.selection.epsilon_ratio},
        {"threshold", p.selection.threshold},
        {"absolute", p.selection.absolute_count},
        {"rounds", p.selection.rounds}}},
      {"train",
       {{"lr", p.train.lr},
        {"epochs", p.train.epochs},
        {"weight_decay", p.train.weight_decay},
        {"dropout", p.train.dropout},
        {"seed", p.train.seed},
        {"warm_start", p.warm_start},
        {"train_on_graph", p.train_on_graph}}},
      {"encoder", {{"feat_dim", p.encoder.feat_dim}, {"seed", p.encoder.seed}}},
      {"ablation",
       {{"nlp", p.ablation.nlp},
        {"nz", p.ablation.nz},
        {"nnl", p.ablation.nnl},
        {"npl", p.ablation.npl},
        {"no_clean", p.ablation.no_clean},
        {"bootstrap_fraction", p.bootstrap_fraction}}},
  };
}

void parse_pipeline_sections(const json& j, PipelineConfig& p) {
  if (j.contains("reconstruct")) {
    const json& r = j.at("reconstruct");
    check_keys(r, {"beta1", "beta2", "gamma", "lambda", "K", "eps", "normalize_s", "dense_cap", "feat_dim_cap"},
               "reconstruct");
    get_if(r, "beta1", p.recon.beta1);
    get_if(r, "beta2", p.recon.beta2);
    get_if(r, "gamma", p.recon.gamma);
    if (r.contains("lambda") && r.contains("K")) {
      fail(ErrorCode::kParse, "run config: give either reconstruct.lambda or reconstruct.K, not both");
    }
    get_if(r, "lambda", p.recon.lambda);
    if (r.contains("K")) p.recon.lambda = uniform_hop_weights(r.at("K").get<int>());
    get_if(r, "eps", p.recon.epsilon_sim);
    if (r.contains("normalize_s")) {
      p.recon.normalize = parse_similarity_normalization(r.at("normalize_s").get<std::string>());
    }
    get_if(r, "dense_cap", p.recon.dense_cap);
    get_if(r, "feat_dim_cap", p.recon.feat_dim_cap);
  }
  if (j.contains("propagate")) {
    const json& r = j.at("propagate");
    check_keys(r, {"path", "alpha1", "alpha2", "alpha3", "alpha4", "tol", "tmax"}, "propagate");
    if (r.contains("path")) p.path = parse_propagation_path(r.at("path").get<std::string>());
    get_if(r, "alpha1", p.mix.alpha1);
    get_if(r, "alpha2", p.mix.alpha2);
    get_if(r, "alpha3", p.mix.alpha3);
    get_if(r, "alpha4", p.mix.alpha4);
    get_if(r, "tol", p.iterate.tol);
    get_if(r, "tmax", p.iterate.t_max);
  }
  if (j.contains("selection")) {
    const json& r = j.at("selection");
    check_keys(r, {"strategy", "epsilon", "threshold", "absolute", "rounds"}, "selection");
    if (r.contains("strategy")) p.selection.strategy = parse_selection_strategy(r.at("strategy").get<std::string>());
    get_if(r, "epsilon", p.selection.epsilon_ratio);
    get_if(r, "threshold", p.selection.threshold);
    get_if(r, "absolute", p.selection.absolute_count);
    get_if(r, "rounds", p.selection.rounds);
  }
  if (j.contains("train")) {
    const json& r = j.at("train");
    check_keys(r, {"lr", "epochs", "weight_decay", "dropout", "seed", "warm_start", "train_on_graph"}, "train");
    get_if(r, "lr", p.train.lr);
    get_if(r, "epochs", p.train.epochs);
    get_if(r, "weight_decay", p.train.weight_decay);
    get_if(r, "dropout", p.train.dropout);
    get_if(r, "seed", p.train.seed);
    get_if(r, "warm_start", p.warm_start);
    get_if(r, "train_on_graph", p.train_on_graph);
  }
  if (j.contains("encoder")) {
    const json& r = j.at("encoder");
    check_keys(r, {"feat_dim", "seed"}, "encoder");
    get_if(r, "feat_dim", p.encoder.feat_dim);
    get_if(r, "seed", p.encoder.seed);
  }
  if (j.contains("ablation")) {
    const json& r = j.at("ablation");
    check_keys(r, {"nlp", "nz", "nnl", "npl", "no_clean", "bootstrap_fraction"}, "ablation");
    get_if(r, "nlp", p.ablation.nlp);
    get_if(r, "nz", p.ablation.nz);
    get_if(r, "nnl", p.ablation.nnl);
    get_if(r, "npl", p.ablation.npl);
    get_if(r, "no_clean", p.ablation.no_clean);
    get_if(r, "bootstrap_fraction", p.bootstrap_fraction);
  }

  require(p.bootstrap_fraction > 0.0 && p.bootstrap_fraction <= 1.0,
          "run config: ablation.bootstrap_fraction must lie in (0, 1]");
  p.recon.validate();
  p.mix.validate();
  p.selection.validate();

  range_warning("lr", p.train.lr, 0.005, 0.03);
  range_warning("dropout", p.train.dropout, 0.0, 0.9);
  range_warning("weight_decay", p.train.weight_decay, 1e-7, 5e-4);
  range_warning("beta1", p.recon.beta1, 0.0, 10.0);
  range_warning("beta2", p.recon.beta2, 0.1, 1000.0);
  range_warning("gamma", p.recon.gamma, 0.0, 0.9);
  if (p.selection.strategy == SelectionStrategy::kRatio) {
    range_warning("epsilon", p.selection.epsilon_ratio, 0.1, 0.9);
  }
}

RunConfig from_json(const json& j, const fs::path& base) {
  check_keys(j, {"dataset", "output_dir", "compare_baseline", "noise", "split", "reconstruct", "propagate",
                 "selection", "train", "encoder", "ablation"},
             "the top level");
  RunConfig c;
  if (!j.contains("dataset")) fail(ErrorCode::kParse, "run config: 'dataset' (manifest path) is required");
  c.dataset = absolute_path(j.at("dataset").get<std::string>(), base);
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  c.output_dir = absolute_path(c.output_dir, base);
  get_if(j, "compare_baseline", c.compare_baseline);

  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, {"kind", "rate", "seed", "flip_permutation", "randomize_flip"}, "noise");
    if (n.contains("kind")) c.noise.kind = parse_noise_kind(n.at("kind").get<std::string>());
    get_if(n, "rate", c.noise.rate);
    get_if(n, "seed", c.noise.seed);
    if (n.contains("flip_permutation") && !n.at("flip_permutation").is_null()) {
      c.noise.flip_permutation = n.at("flip_permutation").get<std::vector<int>>();
    }
    get_if(n, "randomize_flip", c.noise.randomize_flip);
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    check_keys(s, {"seed", "train_fraction", "val_fraction", "clean_fraction", "stratify"}, "split");
    get_if(s, "seed", c.split.seed);
    get_if(s, "train_fraction", c.split.train_fraction);
    get_if(s, "val_fraction", c.split.val_fraction);
    get_if(s, "clean_fraction", c.split.clean_fraction);
    get_if(s, "stratify", c.split.stratify);
  }
  parse_pipeline_sections(j, c.pipeline);
  require(c.noise.rate >= 0.0 && c.noise.rate <= 1.0, "run config: noise.rate must lie in [0, 1]");
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

void write_status(const fs::path& dir, const std::string& status, const std::string& error = {}) {
  json j = {{"status", status}};
  if (!error.empty()) j["error"] = error;
  write_text(dir / "status.json", j.dump(2) + "\n");
}

std::string reports_csv(const PipelineResult& r) {
  std::ostringstream out;
  out << "variant,round,clean_size,noisy_size,selected,homophily,rectification_accuracy,val_accuracy\n";
  for (const RoundReport& rep : r.reports) {
    out << r.variant << ',' << rep.round << ',' << rep.clean_size << ',' << rep.noisy_size << ','
        << rep.selected << ',' << format_double(rep.homophily) << ','
        << format_double(rep.rectification_accuracy) << ',' << format_double(rep.val_accuracy) << '\n';
  }
  return out.str();
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double number_from(const json& j, const char* key) {
  return j.contains(key) && j.at(key).is_number() ? j.at(key).get<double>() : kNotAvailable;
}

}  // namespace

namespace {

json parse_json_text(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string(what) + ": invalid JSON: " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir, std::string_view overrides_json) {
  json j = parse_json_text(text, "run config");
  if (!overrides_json.empty()) j.merge_patch(parse_json_text(overrides_json, "run config overrides"));
  try {
    return from_json(j, base_dir);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("run config: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path, std::string_view overrides_json) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), fs::absolute(path).parent_path(), overrides_json);
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  PipelineConfig p;
  if (text.empty()) return p;
  const json j = parse_json_text(text, "pipeline config");
  try {
    check_keys(j, {"reconstruct", "propagate", "selection", "train", "encoder", "ablation"}, "the top level");
    parse_pipeline_sections(j, p);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("pipeline config: ") + e.what());
  }
  return p;
}

NoisyLabels inject_noise(const Dataset& d, const NoiseSpec& noise, const SplitSpec& split, bool corrupt_clean) {
  require(noise.rate >= 0.0 && noise.rate <= 1.0, "inject_noise: rate must lie in [0, 1]");
  NoisyLabels out;
  Rng split_rng(split.seed);
  SplitOptions so;
  so.train_fraction = split.train_fraction;
  so.val_fraction = split.val_fraction;
  so.clean_fraction = split.clean_fraction;
  so.stratify = split.stratify;
  so.labels = &d.labels;
  out.split = split_nodes(d.graph.num_nodes(), split_rng, so);

  Rng noise_rng(noise.seed);
  FlipPairing pairing;
  pairing.permutation = noise.flip_permutation;
  pairing.randomize = noise.randomize_flip;
  const TransitionMatrix tm = transition_matrix(noise.kind, noise.rate, d.classes, noise_rng, pairing);
  Labels to_corrupt(d.labels.size(), kUnlabeled);
  for (NodeId v : out.split.partition.noisy) to_corrupt[v] = d.labels[v];
  if (corrupt_clean) {
    for (NodeId v : out.split.partition.clean) to_corrupt[v] = d.labels[v];
  }
  const Labels corrupted = corrupt_labels(to_corrupt, tm, noise_rng);
  out.observed.assign(d.labels.size(), kUnlabeled);
  for (std::size_t v = 0; v < corrupted.size(); ++v) {
    if (corrupted[v] == kUnlabeled) continue;
    out.observed[v] = corrupted[v];
    ++out.corrupted;
    out.flipped += corrupted[v] != d.labels[v] ? 1 : 0;
  }
  for (NodeId v : out.split.partition.clean) {
    if (out.observed[v] == kUnlabeled) out.observed[v] = d.labels[v];
  }
  return out;
}

void write_observed_labels(const fs::path& path, const NoisyLabels& labels) {
  const std::size_t n = labels.observed.size();
  std::vector<const char*> role(n, nullptr);
  for (NodeId v : labels.split.partition.clean) role[v] = "clean";
  for (NodeId v : labels.split.partition.noisy) role[v] = "noisy";
  for (NodeId v : labels.split.val) role[v] = "val";
  for (NodeId v : labels.split.test) role[v] = "test";
  std::ostringstream out;
  for (std::size_t v = 0; v < n; ++v) {
    require(role[v] != nullptr, "write_observed_labels: node " + std::to_string(v) + " has no role");
    const bool labeled = role[v][0] == 'c' || role[v][0] == 'n';
    out << v << '\t' << role[v] << '\t' << (labeled ? labels.observed[v] : kUnlabeled) << '\n';
  }
  write_text(path, out.str());
}

NoisyLabels read_observed_labels(const fs::path& path, std::size_t num_nodes, int classes) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  NoisyLabels out;
  out.observed.assign(num_nodes, kUnlabeled);
  std::vector<char> seen(num_nodes, 0);
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t v = 0;
    std::string role;
    long long y = 0;
    if (!(fields >> v >> role >> y)) bad("expected 'node<TAB>role<TAB>label'");
    if (v >= num_nodes) bad("node id outside [0, " + std::to_string(num_nodes) + ")");
    if (seen[v]) bad("node " + std::to_string(v) + " listed twice");
    seen[v] = 1;
    const auto node = static_cast<NodeId>(v);
    if (role == "clean" || role == "noisy") {
      if (y < 0 || y >= classes) bad("label " + std::to_string(y) + " outside [0, " + std::to_string(classes) + ")");
      out.observed[v] = static_cast<std::int32_t>(y);
      (role == "clean" ? out.split.partition.clean : out.split.partition.noisy).push_back(node);
      out.split.train.push_back(node);
    } else if (role == "val" || role == "test") {
      (role == "val" ? out.split.val : out.split.test).push_back(node);
      out.split.partition.unlabeled.push_back(node);
    } else {
      bad("unknown role '" + role + "'");
    }
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (!seen[v]) fail(ErrorCode::kParse, path.string() + ": node " + std::to_string(v) + " is missing");
  }
  for (NodeList* l : {&out.split.partition.clean, &out.split.partition.noisy, &out.split.partition.unlabeled,
                      &out.split.train, &out.split.val, &out.split.test}) {
    std::sort(l->begin(), l->end());
  }
  return out;
}

std::string resolved_config_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunOutcome run_experiment(const RunConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds_since = [](clock::time_point t) {
    return std::chrono::duration<double>(clock::now() - t).count();
  };

  const fs::path& dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  write_status(dir, "running");

  try {
    write_text(dir / "resolved-config.json", resolved_config_json(config));

    auto t = clock::now();
    const Dataset d = load_dataset(config.dataset);
    const double load_time = seconds_since(t);

    t = clock::now();
    const NoisyLabels noisy =
        inject_noise(d, config.noise, config.split, config.pipeline.ablation.no_clean);
    const Split& split = noisy.split;
    const Labels& observed = noisy.observed;
    const double noise_time = seconds_since(t);

    RunOutcome out;
    out.observed_noise =
        noisy.corrupted ? static_cast<double>(noisy.flipped) / static_cast<double>(noisy.corrupted) : 0.0;
    out.result = run_r2lp(d.graph, d.features, d.classes, split, observed, config.pipeline, &d.labels);
    if (config.compare_baseline) {
      out.baseline = run_baseline(d.graph, d.features, d.classes, split, observed, config.pipeline, &d.labels);
    }

    t = clock::now();
    write_text(dir / "reports.csv", reports_csv(out.result));
    {
      std::ostringstream pred;
      for (NodeId v : split.partition.unlabeled) pred << v << '\t' << out.result.predictions[v] << '\n';
      write_text(dir / "predictions.tsv", pred.str());
    }
    json metrics = {{"dataset", d.name},
                    {"variant", out.result.variant},
                    {"test_accuracy", number_or_null(out.result.test_accuracy)},
                    {"val_accuracy", number_or_null(out.result.val_accuracy)},
                    {"rectification_accuracy", number_or_null(out.result.rectification_accuracy)},
                    {"observed_noise", out.observed_noise},
                    {"rounds_run", out.result.reports.size()},
                    {"noisy_exhausted", out.result.noisy_exhausted},
                    {"final_clean_size", out.result.final_clean.size()},
                    {"baseline_test_accuracy",
                     number_or_null(out.baseline ? out.baseline->test_accuracy : kNotAvailable)}};
    write_text(dir / "metrics.json", metrics.dump(2) + "\n");
    const double write_time = seconds_since(t);

    const PhaseTimes& pt = out.result.times;
    json timing = {{"load", load_time},
                   {"split_and_noise", noise_time},
                   {"encode", pt.encode},
                   {"reconstruct", pt.reconstruct},
                   {"train", pt.train},
                   {"propagate", pt.propagate},
                   {"select", pt.select},
                   {"evaluate", pt.evaluate},
                   {"pipeline_total", pt.total},
                   {"baseline_total", out.baseline ? out.baseline->times.total : 0.0},
                   {"write", write_time},
                   {"total", seconds_since(start)}};
    write_text(dir / "timing.json", timing.dump(2) + "\n");
    write_status(dir, "ok");
    return out;
  } catch (const std::exception& e) {
    try {
      write_status(dir, "failed", e.what());
    } catch (...) {
    }
    throw;
  }
}

GridSummary run_seed_grid(const RunConfig& config, const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
  require(!seeds.empty(), "seed grid: no seeds given");
  jobs = std::max<std::size_t>(1, jobs);
  std::vector<RunConfig> cells;
  for (std::uint64_t s : seeds) {
    RunConfig c = config;
    c.noise.seed = s;
    c.split.seed = s;
    c.pipeline.train.seed = s;
    c.pipeline.encoder.seed = s;
    c.output_dir = config.output_dir / ("seed-" + std::to_string(s));
    cells.push_back(std::move(c));
  }

  std::vector<std::string> failures;
  if (jobs == 1) {
    for (const RunConfig& c : cells) {
      try {
        run_experiment(c);
      } catch (const std::exception& e) {
        failures.push_back(c.output_dir.string() + ": " + e.what());
      }
    }
  } else {
    std::size_t next = 0;
    std::size_t running = 0;
    auto reap = [&]() {
      int status = 0;
      const pid_t pid = ::wait(&status);
      if (pid > 0) --running;
      if (pid > 0 && !(WIFEXITED(status) && WEXITSTATUS(status) == 0)) {
        failures.push_back("a grid cell exited with status " + std::to_string(status));
      }
    };
    while (next < cells.size() || running > 0) {
      if (next < cells.size() && running < jobs) {
        const pid_t pid = ::fork();
        if (pid < 0) fail(ErrorCode::kState, "seed grid: fork failed");
        if (pid == 0) {
          int code = 0;
          try {
            run_experiment(cells[next]);
          } catch (const std::exception& e) {
            std::fprintf(stderr, "heterolp: %s\n", e.what());
            code = 1;
          }
          std::_Exit(code);
        }
        ++next;
        ++running;
      } else {
        reap();
      }
    }
  }
  if (!failures.empty()) {
    std::string msg = "seed grid: " + std::to_string(failures.size()) + " cell(s) failed";
    for (const auto& f : failures) msg += "\n  " + f;
    fail(ErrorCode::kState, msg);
  }

  GridSummary summary;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::ifstream in(cells[k].output_dir / "metrics.json");
    if (!in) fail(ErrorCode::kIo, "seed grid: missing metrics for seed " + std::to_string(seeds[k]));
    const json m = json::parse(in);
    GridRow row;
    row.seed = seeds[k];
    row.test_accuracy = number_from(m, "test_accuracy");
    row.rectification_accuracy = number_from(m, "rectification_accuracy");
    row.baseline_test_accuracy = number_from(m, "baseline_test_accuracy");
    summary.rows.push_back(row);
  }

  auto stats = [&summary](double GridRow::*field, double& mean, double& sd) {
    double s = 0.0;
    for (const GridRow& r : summary.rows) s += r.*field;
    const double n = static_cast<double>(summary.rows.size());
    mean = s / n;
    double ss = 0.0;
    for (const GridRow& r : summary.rows) ss += (r.*field - mean) * (r.*field - mean);
    sd = summary.rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  };
  stats(&GridRow::test_accuracy, summary.mean.test_accuracy, summary.stddev.test_accuracy);
  stats(&GridRow::rectification_accuracy, summary.mean.rectification_accuracy,
        summary.stddev.rectification_accuracy);
  stats(&GridRow::baseline_test_accuracy, summary.mean.baseline_test_accuracy,
        summary.stddev.baseline_test_accuracy);

  std::ostringstream csv;
  csv << "seed,test_accuracy,rectification_accuracy,baseline_test_accuracy\n";
  auto line = [&csv](const std::string& key, const GridRow& r) {
    csv << key << ',' << format_double(r.test_accuracy) << ',' << format_double(r.rectification_accuracy) << ','
        << format_double(r.baseline_test_accuracy) << '\n';
  };
  for (const GridRow& r : summary.rows) line(std::to_string(r.seed), r);
  line("mean", summary.mean);
  line("std", summary.stddev);
  write_text(config.output_dir / "summary.csv", csv.str());
  return summary;
}

}  // namespace heterolp
