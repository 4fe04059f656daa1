// heterolp command-line front end. Talks to the library only through the C API.
#include <heterolp/heterolp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

using nlohmann::json;

struct CliError {
  int code;
};

void check(hlp_status s, const char* what) {
  if (s == HLP_OK) return;
  std::fprintf(stderr, "heterolp %s: %s: %s\n", what, hlp_status_name(s), hlp_last_error());
  throw CliError{1};
}

struct DatasetDeleter {
  void operator()(hlp_dataset* d) const { hlp_dataset_free(d); }
};
struct ConfigDeleter {
  void operator()(hlp_config* c) const { hlp_config_free(c); }
};
using DatasetPtr = std::unique_ptr<hlp_dataset, DatasetDeleter>;
using ConfigPtr = std::unique_ptr<hlp_config, ConfigDeleter>;

DatasetPtr load(const std::string& manifest) {
  hlp_dataset* d = nullptr;
  check(hlp_dataset_load(manifest.c_str(), &d), "load");
  return DatasetPtr(d);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "heterolp: cannot open '%s'\n", path.c_str());
    throw CliError{1};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_or_die(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "heterolp: %s: invalid JSON: %s\n", what.c_str(), e.what());
    throw CliError{1};
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Flags that share a spelling across reconstruct, propagate and run. Unset
// flags leave the config file's value alone.
struct PipelineFlags {
  std::optional<double> beta1, beta2, gamma, eps, alpha1, alpha2, alpha3, alpha4, lr, epsilon;
  std::optional<int> hops;
  std::optional<std::size_t> epochs, rounds, feat_dim;
  std::optional<std::string> path, strategy;
  std::vector<std::string> ablations;

  void add(CLI::App* app) {
    app->add_option("--beta1", beta1, "weight of ||Z||^2");
    app->add_option("--beta2", beta2, "weight pulling Z toward the hop operator");
    app->add_option("--gamma", gamma, "weight of the initial embeddings");
    app->add_option("--hops", hops, "K, with uniform hop weights");
    app->add_option("--eps-sim", eps, "cosine-distance threshold of the thresholded graph");
    app->add_option("--path", path, "propagation path")->check(CLI::IsMember({"fast", "closed", "iterative"}));
    app->add_option("--alpha1", alpha1);
    app->add_option("--alpha2", alpha2);
    app->add_option("--alpha3", alpha3);
    app->add_option("--alpha4", alpha4);
    app->add_option("--lr", lr);
    app->add_option("--epochs", epochs);
    app->add_option("--feat-dim", feat_dim, "encoder width");
    app->add_option("--rounds", rounds, "selection rounds T");
    app->add_option("--epsilon", epsilon, "ratio of the noisy set selected per round");
    app->add_option("--strategy", strategy)->check(CLI::IsMember({"ratio", "threshold", "absolute"}));
    app->add_option("--ablation", ablations, "nlp, nz, nnl, npl, no_clean")
        ->delimiter(',')
        ->check(CLI::IsMember({"nlp", "nz", "nnl", "npl", "no_clean"}));
  }

  void patch(json& j) const {
    auto set = [&j](const char* section, const char* key, const auto& v) {
      if (v) j[section][key] = *v;
    };
    set("reconstruct", "beta1", beta1);
    set("reconstruct", "beta2", beta2);
    set("reconstruct", "gamma", gamma);
    set("reconstruct", "K", hops);
    set("reconstruct", "eps", eps);
    set("propagate", "path", path);
    set("propagate", "alpha1", alpha1);
    set("propagate", "alpha2", alpha2);
    set("propagate", "alpha3", alpha3);
    set("propagate", "alpha4", alpha4);
    set("train", "lr", lr);
    set("train", "epochs", epochs);
    set("encoder", "feat_dim", feat_dim);
    set("selection", "rounds", rounds);
    set("selection", "epsilon", epsilon);
    set("selection", "strategy", strategy);
    for (const std::string& a : ablations) j["ablation"][a] = true;
    // Merged as a patch, the null drops a lambda given in the file.
    if (hops) j["reconstruct"]["lambda"] = nullptr;
  }
};

// Pipeline sections from an optional file with the flags merged on top.
std::string pipeline_json(const std::string& config_path, const PipelineFlags& flags) {
  json j = config_path.empty() ? json::object() : parse_or_die(read_file(config_path), config_path);
  json patch = json::object();
  flags.patch(patch);
  j.merge_patch(patch);
  return j.dump();
}

void on_warning(const char* msg, void*) { std::fprintf(stderr, "heterolp: warning: %s\n", msg); }

std::vector<double> parse_doubles(const std::string& list, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::fprintf(stderr, "heterolp: --grid %s: '%s' is not a number\n", key.c_str(), item.c_str());
      throw CliError{2};
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  hlp_set_warning_handler(on_warning, nullptr);

  CLI::App app{"heterolp: label propagation over reconstructed graphs for noisy node labels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hlp_version()));

  // gen-sbm
  hlp_sbm_spec sbm;
  hlp_sbm_spec_default(&sbm);
  std::string sbm_out;
  std::string sbm_stem = "manifest";
  auto* gen = app.add_subcommand("gen-sbm", "generate a stochastic block model dataset");
  gen->add_option("--nodes", sbm.num_nodes)->capture_default_str();
  gen->add_option("--classes", sbm.classes)->capture_default_str();
  gen->add_option("--p-intra", sbm.p_intra)->capture_default_str();
  gen->add_option("--p-inter", sbm.p_inter)->capture_default_str();
  gen->add_option("--feature-dim", sbm.feature_dim)->capture_default_str();
  gen->add_option("--separation", sbm.separation)->capture_default_str();
  gen->add_option("--feature-noise", sbm.feature_noise)->capture_default_str();
  gen->add_option("--seed", sbm.seed)->capture_default_str();
  gen->add_option("--out", sbm_out, "output directory")->required();
  gen->add_option("--stem", sbm_stem, "manifest file stem")->capture_default_str();

  // inject-noise
  hlp_noise_options noise;
  hlp_noise_options_default(&noise);
  std::string noise_dataset, noise_out, noise_kind = "uniform";
  std::vector<int> flip_perm;
  bool stratify = false, randomize_flip = false, corrupt_clean = false;
  auto* inj = app.add_subcommand("inject-noise", "split the nodes and corrupt the noisy labels");
  inj->add_option("--dataset", noise_dataset, "manifest path")->required();
  inj->add_option("--out", noise_out, "observed-labels file (node, role, label)")->required();
  inj->add_option("--kind", noise_kind)->check(CLI::IsMember({"uniform", "flip"}))->capture_default_str();
  inj->add_option("--rate", noise.rate)->capture_default_str();
  inj->add_option("--seed", noise.noise_seed, "noise seed")->capture_default_str();
  inj->add_option("--split-seed", noise.split_seed)->capture_default_str();
  inj->add_option("--train-fraction", noise.train_fraction)->capture_default_str();
  inj->add_option("--val-fraction", noise.val_fraction)->capture_default_str();
  inj->add_option("--clean-fraction", noise.clean_fraction)->capture_default_str();
  inj->add_option("--flip-permutation", flip_perm, "class map for flip noise")->delimiter(',');
  inj->add_flag("--randomize-flip", randomize_flip, "random derangement for flip noise");
  inj->add_flag("--stratify", stratify, "stratify the clean set by class");
  inj->add_flag("--corrupt-clean", corrupt_clean, "corrupt the clean set as well");

  // reconstruct
  std::string rec_dataset, rec_observed, rec_config, rec_out;
  std::size_t rec_k = 0;
  PipelineFlags rec_flags;
  auto* rec = app.add_subcommand("reconstruct", "build S and write its top-k view");
  rec->add_option("--dataset", rec_dataset, "manifest path")->required();
  rec->add_option("--observed", rec_observed, "observed-labels file from inject-noise")->required();
  rec->add_option("--config", rec_config, "JSON with pipeline sections");
  rec->add_option("--k", rec_k, "neighbors per node in the view (0: average degree)")->capture_default_str();
  rec->add_option("--out", rec_out, "edge list of the view")->required();
  rec_flags.add(rec);

  // propagate
  std::string prop_dataset, prop_observed, prop_config, prop_out;
  PipelineFlags prop_flags;
  auto* prop = app.add_subcommand("propagate", "one propagation over S from the observed labels");
  prop->add_option("--dataset", prop_dataset, "manifest path")->required();
  prop->add_option("--observed", prop_observed, "observed-labels file from inject-noise")->required();
  prop->add_option("--config", prop_config, "JSON with pipeline sections");
  prop->add_option("--out", prop_out, "predictions (node, label, confidence)")->required();
  prop_flags.add(prop);

  // run
  std::string run_config, run_output, run_dataset, run_noise_kind;
  std::optional<double> run_noise_rate;
  std::optional<std::uint64_t> run_seed;
  std::vector<std::uint64_t> run_seeds;
  std::size_t run_jobs = 1;
  bool run_no_baseline = false, run_print = false;
  PipelineFlags run_flags;
  auto* run = app.add_subcommand("run", "full experiment from a JSON config; flags override the file");
  run->add_option("--config", run_config, "run config (JSON)")->required();
  run->add_option("--output-dir", run_output);
  run->add_option("--dataset", run_dataset, "manifest path");
  run->add_option("--noise-kind", run_noise_kind)->check(CLI::IsMember({"uniform", "flip"}));
  run->add_option("--noise-rate", run_noise_rate);
  run->add_option("--seed", run_seed, "noise, split, encoder and training seed");
  run->add_option("--seeds", run_seeds, "seed grid, one run per seed")->delimiter(',');
  run->add_option("--jobs", run_jobs, "parallel processes for the seed grid")->capture_default_str();
  run->add_flag("--no-baseline", run_no_baseline, "skip the unrectified baseline");
  run->add_flag("--print-config", run_print, "print the resolved config and exit");
  run_flags.add(run);

  // verify-theory
  std::vector<std::string> grid_spec;
  std::uint64_t vt_trials = 1000000, vt_seed = 0;
  double vt_tol = 4.0, vt_prior = 0.5;
  std::string vt_out;
  auto* vt = app.add_subcommand("verify-theory", "denoising gap: closed form against Monte Carlo");
  vt->add_option("--grid", grid_spec, "e=.. p=.. d=.. alpha=.. (comma lists)")->expected(1, 4);
  vt->add_option("--trials", vt_trials)->capture_default_str();
  vt->add_option("--seed", vt_seed)->capture_default_str();
  vt->add_option("--tolerance-se", vt_tol, "pass band in standard errors")->capture_default_str();
  vt->add_option("--prior0", vt_prior, "P(Y = 0)")->capture_default_str();
  vt->add_option("--out", vt_out, "CSV path (default: stdout)");

  // bench-scaling
  hlp_scaling_options bench;
  hlp_scaling_options_default(&bench);
  std::vector<std::size_t> bench_sizes{10000, 20000, 40000, 80000};
  std::string bench_out;
  auto* bs = app.add_subcommand("bench-scaling", "lp_fast wall clock on an SBM scaling series");
  bs->add_option("--sizes", bench_sizes)->delimiter(',')->capture_default_str();
  bs->add_option("--degree", bench.average_degree)->capture_default_str();
  bs->add_option("--homophily", bench.homophily)->capture_default_str();
  bs->add_option("--feature-dim", bench.feature_dim)->capture_default_str();
  bs->add_option("--embed-dim", bench.embed_dim)->capture_default_str();
  bs->add_option("--repeats", bench.repeats)->capture_default_str();
  bs->add_option("--seed", bench.seed)->capture_default_str();
  bs->add_option("--out", bench_out, "CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      hlp_dataset* raw = nullptr;
      double eh = 0.0, ee = 0.0;
      check(hlp_generate_sbm(&sbm, &raw, &eh, &ee), "gen-sbm");
      DatasetPtr d(raw);
      check(hlp_dataset_save(d.get(), sbm_out.c_str(), sbm_stem.c_str()), "gen-sbm");
      hlp_dataset_info info;
      check(hlp_dataset_info_get(d.get(), &info), "gen-sbm");
      std::printf("nodes %zu  edges %zu (expected %.1f)  homophily %.4f (expected %.4f)\n", info.num_nodes,
                  info.num_edges, ee, info.homophily, eh);
    } else if (*inj) {
      DatasetPtr d = load(noise_dataset);
      noise.kind = noise_kind == "flip" ? HLP_NOISE_FLIP : HLP_NOISE_UNIFORM;
      noise.flip_permutation = flip_perm.empty() ? nullptr : flip_perm.data();
      hlp_dataset_info info;
      check(hlp_dataset_info_get(d.get(), &info), "inject-noise");
      if (!flip_perm.empty() && flip_perm.size() != static_cast<std::size_t>(info.classes)) {
        std::fprintf(stderr, "heterolp inject-noise: --flip-permutation needs %d entries\n", info.classes);
        return 2;
      }
      noise.randomize_flip = randomize_flip;
      noise.stratify = stratify;
      noise.corrupt_clean = corrupt_clean;
      hlp_noise_summary s;
      check(hlp_inject_noise(d.get(), &noise, noise_out.c_str(), &s), "inject-noise");
      std::printf("clean %zu  noisy %zu  val %zu  test %zu  flipped %zu of %zu\n", s.clean, s.noisy, s.val,
                  s.test, s.flipped, s.corrupted);
    } else if (*rec) {
      DatasetPtr d = load(rec_dataset);
      const std::string cfg = pipeline_json(rec_config, rec_flags);
      hlp_reconstruct_summary s;
      check(hlp_reconstruct(d.get(), rec_observed.c_str(), cfg.c_str(), rec_k, rec_out.c_str(), &s), "reconstruct");
      std::printf("view k=%zu  edges %zu  homophily %s (input graph %s)\n", s.view_k, s.view_edges,
                  num(s.view_homophily).c_str(), num(s.input_homophily).c_str());
    } else if (*prop) {
      DatasetPtr d = load(prop_dataset);
      const std::string cfg = pipeline_json(prop_config, prop_flags);
      hlp_propagate_summary s;
      check(hlp_propagate(d.get(), prop_observed.c_str(), cfg.c_str(), prop_out.c_str(), &s), "propagate");
      std::printf("iterations %zu  noisy-set accuracy %s  val %s  test %s\n", s.iterations,
                  num(s.noisy_accuracy).c_str(), num(s.val_accuracy).c_str(), num(s.test_accuracy).c_str());
    } else if (*run) {
      json patch = json::object();
      run_flags.patch(patch);
      if (!run_output.empty()) patch["output_dir"] = std::filesystem::absolute(run_output).string();
      if (!run_dataset.empty()) patch["dataset"] = std::filesystem::absolute(run_dataset).string();
      if (!run_noise_kind.empty()) patch["noise"]["kind"] = run_noise_kind;
      if (run_noise_rate) patch["noise"]["rate"] = *run_noise_rate;
      if (run_seed) {
        patch["noise"]["seed"] = *run_seed;
        patch["split"]["seed"] = *run_seed;
        patch["train"]["seed"] = *run_seed;
        patch["encoder"]["seed"] = *run_seed;
      }
      if (run_no_baseline) patch["compare_baseline"] = false;
      hlp_config* raw = nullptr;
      check(hlp_config_load(run_config.c_str(), patch.dump().c_str(), &raw), "run");
      ConfigPtr cfg(raw);
      if (run_print) {
        char* text = nullptr;
        check(hlp_config_to_json(cfg.get(), &text), "run");
        std::fputs(text, stdout);
        hlp_string_free(text);
        return 0;
      }
      if (!run_seeds.empty()) {
        hlp_grid_summary g;
        check(hlp_run_grid(cfg.get(), run_seeds.data(), run_seeds.size(), run_jobs, &g), "run");
        std::printf("runs %zu  test %s +- %s  rectification %s +- %s  baseline %s +- %s\n", g.runs,
                    num(g.mean_test_accuracy).c_str(), num(g.std_test_accuracy).c_str(),
                    num(g.mean_rectification_accuracy).c_str(), num(g.std_rectification_accuracy).c_str(),
                    num(g.mean_baseline_test_accuracy).c_str(), num(g.std_baseline_test_accuracy).c_str());
      } else {
        hlp_run_summary s;
        check(hlp_run(cfg.get(), &s), "run");
        std::printf("rounds %zu  test %s  val %s  rectification %s  baseline %s  (%.2f s)\n", s.rounds,
                    num(s.test_accuracy).c_str(), num(s.val_accuracy).c_str(),
                    num(s.rectification_accuracy).c_str(), num(s.baseline_test_accuracy).c_str(), s.seconds);
      }
    } else if (*vt) {
      std::vector<double> e{0.1, 0.2, 0.3, 0.4, 0.5}, p{0.5, 0.6, 0.7, 0.8, 0.9}, alpha{0.0, 0.5, 1.0};
      std::vector<int> deg{2, 5, 10};
      // Axes may come as separate arguments or as one quoted string.
      std::vector<std::string> axes;
      for (const std::string& arg : grid_spec) {
        std::istringstream words(arg);
        for (std::string w; words >> w;) axes.push_back(w);
      }
      for (const std::string& item : axes) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          std::fprintf(stderr, "heterolp verify-theory: --grid entries look like e=0.1,0.2\n");
          return 2;
        }
        const std::string key = item.substr(0, eq);
        const std::vector<double> values = parse_doubles(item.substr(eq + 1), key);
        if (key == "e") {
          e = values;
        } else if (key == "p") {
          p = values;
        } else if (key == "alpha") {
          alpha = values;
        } else if (key == "d") {
          deg.clear();
          for (double v : values) deg.push_back(static_cast<int>(v));
        } else {
          std::fprintf(stderr, "heterolp verify-theory: unknown grid axis '%s'\n", key.c_str());
          return 2;
        }
      }
      hlp_theory_grid g{e.data(), e.size(), p.data(), p.size(), deg.data(), deg.size(),
                        alpha.data(), alpha.size(), vt_prior};
      std::size_t cells = 0, failures = 0;
      if (vt_out.empty()) {
        // Route the CSV through a temporary file to keep stdout clean.
        char name[] = "/tmp/heterolp-theory-XXXXXX";
        const int fd = mkstemp(name);
        if (fd < 0) {
          std::perror("heterolp verify-theory");
          return 1;
        }
        close(fd);
        const hlp_status st = hlp_verify_theory(&g, vt_trials, vt_seed, vt_tol, name, &cells, &failures);
        if (st == HLP_OK) std::fputs(read_file(name).c_str(), stdout);
        std::remove(name);
        check(st, "verify-theory");
      } else {
        check(hlp_verify_theory(&g, vt_trials, vt_seed, vt_tol, vt_out.c_str(), &cells, &failures), "verify-theory");
      }
      std::fprintf(stderr, "%zu cells, %zu outside %.1f SE\n", cells, failures, vt_tol);
      return failures == 0 ? 0 : 3;
    } else if (*bs) {
      bench.sizes = bench_sizes.data();
      bench.num_sizes = bench_sizes.size();
      double slope = 0.0;
      if (bench_out.empty()) {
        char name[] = "/tmp/heterolp-bench-XXXXXX";
        const int fd = mkstemp(name);
        if (fd < 0) {
          std::perror("heterolp bench-scaling");
          return 1;
        }
        close(fd);
        const hlp_status st = hlp_bench_scaling(&bench, name, &slope);
        if (st == HLP_OK) std::fputs(read_file(name).c_str(), stdout);
        std::remove(name);
        check(st, "bench-scaling");
      } else {
        check(hlp_bench_scaling(&bench, bench_out.c_str(), &slope), "bench-scaling");
      }
      std::fprintf(stderr, "log-log slope %.3f\n", slope);
    }
  } catch (const CliError& e) {
    return e.code;
  }
  return 0;
}
