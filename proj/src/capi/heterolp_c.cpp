#include "heterolp/heterolp.h"

#include "bench.hpp"
#include "dataset_io.hpp"
#include "experiment.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "theory.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <new>
#include <sstream>

struct hlp_dataset {
  heterolp::Dataset data;
};

struct hlp_config {
  heterolp::RunConfig config;
};

namespace {

using namespace heterolp;

thread_local std::string g_last_error;

hlp_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return HLP_E_INVALID_ARGUMENT;
    case ErrorCode::kIo: return HLP_E_IO;
    case ErrorCode::kParse: return HLP_E_PARSE;
    case ErrorCode::kNumeric: return HLP_E_NUMERIC;
    case ErrorCode::kCapacity: return HLP_E_CAPACITY;
    case ErrorCode::kState: return HLP_E_STATE;
  }
  return HLP_E_INTERNAL;
}

// Runs `body`, translating exceptions into a status and the thread's message.
template <typename F>
hlp_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HLP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HLP_E_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HLP_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HLP_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

std::string_view text_or_empty(const char* s) { return s ? std::string_view(s) : std::string_view(); }

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void write_file(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, std::string("cannot write '") + path + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, std::string("failed writing '") + path + "'");
}

double accuracy_on(const Labels& predicted, const Labels& truth, const NodeList& nodes) {
  if (nodes.empty()) return kNotAvailable;
  std::size_t hit = 0;
  for (NodeId v : nodes) hit += predicted[v] == truth[v] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(nodes.size());
}

struct WarningHandler {
  std::mutex mu;
  hlp_warning_fn fn = nullptr;
  void* user = nullptr;
};

WarningHandler& warning_handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

extern "C" {

const char* hlp_version(void) { return "0.1.0"; }

const char* hlp_status_name(hlp_status status) {
  switch (status) {
    case HLP_OK: return "ok";
    case HLP_E_INVALID_ARGUMENT: return "invalid argument";
    case HLP_E_IO: return "i/o error";
    case HLP_E_PARSE: return "parse error";
    case HLP_E_NUMERIC: return "numeric error";
    case HLP_E_CAPACITY: return "capacity exceeded";
    case HLP_E_STATE: return "invalid state";
    default: return "internal error";
  }
}

const char* hlp_last_error(void) { return g_last_error.c_str(); }

void hlp_string_free(char* s) { std::free(s); }

void hlp_set_warning_handler(hlp_warning_fn fn, void* user) {
  WarningHandler& h = warning_handler();
  {
    std::lock_guard<std::mutex> lock(h.mu);
    h.fn = fn;
    h.user = user;
  }
  if (fn == nullptr) {
    set_warning_sink([](const std::string& msg) { std::fprintf(stderr, "heterolp: warning: %s\n", msg.c_str()); });
    return;
  }
  set_warning_sink([](const std::string& msg) {
    WarningHandler& w = warning_handler();
    std::lock_guard<std::mutex> lock(w.mu);
    if (w.fn) w.fn(msg.c_str(), w.user);
  });
}

size_t hlp_thread_count(void) { return thread_count(); }

hlp_status hlp_dataset_load(const char* manifest_path, hlp_dataset** out) {
  return guarded([&] {
    need(manifest_path, "manifest_path");
    need(out, "out");
    *out = nullptr;
    auto d = std::make_unique<hlp_dataset>();
    d->data = load_dataset(manifest_path);
    *out = d.release();
  });
}

hlp_status hlp_dataset_info_get(const hlp_dataset* d, hlp_dataset_info* out) {
  return guarded([&] {
    need(d, "dataset");
    need(out, "out");
    const Dataset& x = d->data;
    out->num_nodes = x.graph.num_nodes();
    out->num_edges = x.graph.num_edges();
    out->num_features = static_cast<size_t>(x.features.cols());
    out->classes = x.classes;
    out->homophily = edge_homophily(x.graph, x.labels);
  });
}

hlp_status hlp_dataset_save(const hlp_dataset* d, const char* dir, const char* stem) {
  return guarded([&] {
    need(d, "dataset");
    need(dir, "dir");
    save_dataset(d->data, dir, stem && *stem ? stem : "manifest");
  });
}

void hlp_dataset_free(hlp_dataset* d) { delete d; }

void hlp_sbm_spec_default(hlp_sbm_spec* spec) {
  if (!spec) return;
  const SBMSpec s;
  *spec = {s.num_nodes, s.classes, s.p_intra, s.p_inter, s.feature_dim, s.separation, s.feature_noise, s.seed};
}

hlp_status hlp_generate_sbm(const hlp_sbm_spec* spec, hlp_dataset** out, double* expected_homophily,
                            double* expected_edges) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = nullptr;
    SBMSpec s;
    s.num_nodes = spec->num_nodes;
    s.classes = spec->classes;
    s.p_intra = spec->p_intra;
    s.p_inter = spec->p_inter;
    s.feature_dim = spec->feature_dim;
    s.separation = spec->separation;
    s.feature_noise = spec->feature_noise;
    s.seed = spec->seed;
    SBMSample sample = generate_sbm(s);
    if (expected_homophily) *expected_homophily = sample.expected_homophily;
    if (expected_edges) *expected_edges = sample.expected_edges;
    auto d = std::make_unique<hlp_dataset>();
    d->data = std::move(sample.dataset);
    *out = d.release();
  });
}

void hlp_noise_options_default(hlp_noise_options* opts) {
  if (!opts) return;
  const NoiseSpec n;
  const SplitSpec s;
  *opts = {};
  opts->kind = n.kind == NoiseKind::kFlip ? HLP_NOISE_FLIP : HLP_NOISE_UNIFORM;
  opts->rate = n.rate;
  opts->noise_seed = n.seed;
  opts->flip_permutation = nullptr;
  opts->randomize_flip = n.randomize_flip ? 1 : 0;
  opts->split_seed = s.seed;
  opts->train_fraction = s.train_fraction;
  opts->val_fraction = s.val_fraction;
  opts->clean_fraction = s.clean_fraction;
  opts->stratify = s.stratify ? 1 : 0;
  opts->corrupt_clean = 0;
}

hlp_status hlp_inject_noise(const hlp_dataset* d, const hlp_noise_options* opts, const char* out_path,
                            hlp_noise_summary* summary) {
  return guarded([&] {
    need(d, "dataset");
    need(opts, "opts");
    need(out_path, "out_path");
    NoiseSpec n;
    n.kind = opts->kind == HLP_NOISE_FLIP ? NoiseKind::kFlip : NoiseKind::kUniform;
    n.rate = opts->rate;
    n.seed = opts->noise_seed;
    if (opts->flip_permutation) {
      n.flip_permutation = std::vector<int>(opts->flip_permutation, opts->flip_permutation + d->data.classes);
    }
    n.randomize_flip = opts->randomize_flip != 0;
    SplitSpec s;
    s.seed = opts->split_seed;
    s.train_fraction = opts->train_fraction;
    s.val_fraction = opts->val_fraction;
    s.clean_fraction = opts->clean_fraction;
    s.stratify = opts->stratify != 0;
    const NoisyLabels labels = inject_noise(d->data, n, s, opts->corrupt_clean != 0);
    write_observed_labels(out_path, labels);
    if (summary) {
      summary->clean = labels.split.partition.clean.size();
      summary->noisy = labels.split.partition.noisy.size();
      summary->val = labels.split.val.size();
      summary->test = labels.split.test.size();
      summary->corrupted = labels.corrupted;
      summary->flipped = labels.flipped;
    }
  });
}

hlp_status hlp_reconstruct(const hlp_dataset* d, const char* observed_path, const char* pipeline_json,
                           size_t view_k, const char* edges_out, hlp_reconstruct_summary* summary) {
  return guarded([&] {
    need(d, "dataset");
    need(observed_path, "observed_path");
    const Dataset& x = d->data;
    const PipelineConfig cfg = parse_pipeline_config(text_or_empty(pipeline_json));
    const NoisyLabels obs = read_observed_labels(observed_path, x.graph.num_nodes(), x.classes);
    if (view_k == 0) view_k = static_cast<size_t>(std::max(1.0, std::round(x.graph.average_degree())));
    const RoundSnapshot snap =
        reconstruct_and_propagate(x.graph, x.features, x.classes, obs.split.partition, obs.observed, cfg, view_k,
                                  false);
    if (edges_out) {
      std::ostringstream out;
      for (const Edge& e : snap.view.edge_list()) out << e.u << '\t' << e.v << '\n';
      write_file(edges_out, out.str());
    }
    if (summary) {
      summary->view_k = view_k;
      summary->view_edges = snap.view.num_edges();
      summary->view_homophily = edge_homophily(snap.view, x.labels);
      summary->input_homophily = edge_homophily(x.graph, x.labels);
    }
  });
}

hlp_status hlp_propagate(const hlp_dataset* d, const char* observed_path, const char* pipeline_json,
                         const char* predictions_out, hlp_propagate_summary* summary) {
  return guarded([&] {
    need(d, "dataset");
    need(observed_path, "observed_path");
    const Dataset& x = d->data;
    const PipelineConfig cfg = parse_pipeline_config(text_or_empty(pipeline_json));
    const NoisyLabels obs = read_observed_labels(observed_path, x.graph.num_nodes(), x.classes);
    const auto view_k = static_cast<size_t>(std::max(1.0, std::round(x.graph.average_degree())));
    const RoundSnapshot snap =
        reconstruct_and_propagate(x.graph, x.features, x.classes, obs.split.partition, obs.observed, cfg, view_k,
                                  !cfg.ablation.nlp);
    if (predictions_out) {
      std::ostringstream out;
      for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(snap.labels.size()); ++v) {
        const double score =
            snap.f.size() ? confidence(snap.f.row(v).data(), static_cast<std::size_t>(snap.f.cols())).score : 1.0;
        out << v << '\t' << snap.labels[v] << '\t' << format_double(score) << '\n';
      }
      write_file(predictions_out, out.str());
    }
    if (summary) {
      summary->iterations = snap.iterations;
      summary->residual = snap.residual;
      summary->noisy_accuracy = accuracy_on(snap.labels, x.labels, obs.split.partition.noisy);
      summary->val_accuracy = accuracy_on(snap.labels, x.labels, obs.split.val);
      summary->test_accuracy = accuracy_on(snap.labels, x.labels, obs.split.test);
    }
  });
}

hlp_status hlp_config_load(const char* path, const char* overrides_json, hlp_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    auto c = std::make_unique<hlp_config>();
    c->config = load_run_config(path, text_or_empty(overrides_json));
    *out = c.release();
  });
}

hlp_status hlp_config_parse(const char* json_text, const char* base_dir, const char* overrides_json,
                            hlp_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    auto c = std::make_unique<hlp_config>();
    const std::filesystem::path base = base_dir ? std::filesystem::path(base_dir) : std::filesystem::current_path();
    c->config = parse_run_config(json_text, std::filesystem::absolute(base), text_or_empty(overrides_json));
    *out = c.release();
  });
}

hlp_status hlp_config_to_json(const hlp_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = copy_string(resolved_config_json(cfg->config));
  });
}

void hlp_config_free(hlp_config* cfg) { delete cfg; }

hlp_status hlp_run(const hlp_config* cfg, hlp_run_summary* summary) {
  return guarded([&] {
    need(cfg, "config");
    const RunOutcome o = run_experiment(cfg->config);
    if (summary) {
      summary->test_accuracy = o.result.test_accuracy;
      summary->val_accuracy = o.result.val_accuracy;
      summary->rectification_accuracy = o.result.rectification_accuracy;
      summary->baseline_test_accuracy = o.baseline ? o.baseline->test_accuracy : kNotAvailable;
      summary->observed_noise = o.observed_noise;
      summary->rounds = o.result.reports.size();
      summary->seconds = o.result.times.total + (o.baseline ? o.baseline->times.total : 0.0);
    }
  });
}

hlp_status hlp_run_grid(const hlp_config* cfg, const uint64_t* seeds, size_t num_seeds, size_t jobs,
                        hlp_grid_summary* summary) {
  return guarded([&] {
    need(cfg, "config");
    need(seeds, "seeds");
    const GridSummary g = run_seed_grid(cfg->config, std::vector<std::uint64_t>(seeds, seeds + num_seeds), jobs);
    if (summary) {
      summary->runs = g.rows.size();
      summary->mean_test_accuracy = g.mean.test_accuracy;
      summary->std_test_accuracy = g.stddev.test_accuracy;
      summary->mean_rectification_accuracy = g.mean.rectification_accuracy;
      summary->std_rectification_accuracy = g.stddev.rectification_accuracy;
      summary->mean_baseline_test_accuracy = g.mean.baseline_test_accuracy;
      summary->std_baseline_test_accuracy = g.stddev.baseline_test_accuracy;
    }
  });
}

hlp_status hlp_denoise_gap(double e, double p, int degree, double alpha, double prior0, double* out) {
  return guarded([&] {
    need(out, "out");
    theory::DenoiseParams params{e, p, degree, alpha, prior0};
    *out = theory::denoise_gap(params);
  });
}

hlp_status hlp_verify_theory(const hlp_theory_grid* grid, uint64_t trials, uint64_t seed, double tolerance_se,
                             const char* csv_out, size_t* cells, size_t* failures) {
  return guarded([&] {
    need(grid, "grid");
    auto take = [](const auto* p, size_t n, const char* what) {
      if (n > 0) need(p, what);
      return std::vector<std::remove_cv_t<std::remove_pointer_t<decltype(p)>>>(p, p + n);
    };
    theory::Grid g;
    g.e = take(grid->e, grid->num_e, "grid.e");
    g.p = take(grid->p, grid->num_p, "grid.p");
    g.degree = take(grid->degree, grid->num_degree, "grid.degree");
    g.alpha = take(grid->alpha, grid->num_alpha, "grid.alpha");
    g.prior0 = grid->prior0;
    const std::vector<theory::GridCell> out = theory::verify_grid(g, trials, seed, tolerance_se);
    size_t bad = 0;
    std::ostringstream csv;
    csv << "cell,e,p,d,alpha,analytic,empirical,se,pass\n";
    for (size_t k = 0; k < out.size(); ++k) {
      const theory::GridCell& c = out[k];
      bad += c.pass ? 0 : 1;
      csv << k << ',' << format_double(c.params.e) << ',' << format_double(c.params.p) << ',' << c.params.degree
          << ',' << format_double(c.params.alpha) << ',' << format_double(c.analytic) << ','
          << format_double(c.empirical.gap) << ',' << format_double(c.empirical.standard_error) << ','
          << (c.pass ? "pass" : "fail") << '\n';
    }
    if (csv_out) write_file(csv_out, csv.str());
    if (cells) *cells = out.size();
    if (failures) *failures = bad;
  });
}

void hlp_scaling_options_default(hlp_scaling_options* opts) {
  if (!opts) return;
  *opts = {};
  opts->average_degree = 10.0;
  opts->homophily = 0.9;
  opts->feature_dim = 16;
  opts->embed_dim = 16;
  opts->repeats = 3;
  opts->seed = 0;
}

hlp_status hlp_bench_scaling(const hlp_scaling_options* opts, const char* csv_out, double* slope) {
  return guarded([&] {
    need(opts, "opts");
    need(opts->sizes, "opts.sizes");
    require(opts->num_sizes >= 1, "bench_scaling: no sizes given");
    require(opts->average_degree > 0.0, "bench_scaling: average degree must be positive");
    require(opts->homophily >= 0.0 && opts->homophily <= 1.0, "bench_scaling: homophily must lie in [0, 1]");
    ScalingBench b;
    b.sizes.assign(opts->sizes, opts->sizes + opts->num_sizes);
    b.feat_dim = opts->embed_dim;
    b.repeats = opts->repeats;
    // Two balanced blocks: a node expects (n/2 - 1) p_intra same-class and
    // (n/2) p_inter cross-class neighbors.
    const double half = static_cast<double>(b.sizes.front()) / 2.0;
    require(half > 1.0, "bench_scaling: sizes must be at least 3");
    b.base.num_nodes = b.sizes.front();
    b.base.classes = 2;
    b.base.p_intra = opts->homophily * opts->average_degree / (half - 1.0);
    b.base.p_inter = (1.0 - opts->homophily) * opts->average_degree / half;
    b.base.feature_dim = opts->feature_dim;
    b.base.seed = opts->seed;
    const std::vector<ScalingPoint> points = bench_lp_fast(b);
    if (csv_out) {
      std::ostringstream csv;
      csv << "n,edges,seconds\n";
      for (const ScalingPoint& p : points) csv << p.num_nodes << ',' << p.num_edges << ',' << format_double(p.seconds) << '\n';
      write_file(csv_out, csv.str());
    }
    if (slope) *slope = points.size() >= 2 ? loglog_slope(points) : kNotAvailable;
  });
}

}  // extern "C"
