/* heterolp: label propagation with reconstructed graphs for noisy node labels.
 *
 * Every function returns an hlp_status; on failure hlp_last_error() holds a
 * message for the calling thread. Objects are opaque handles released with
 * their _free function; _free(NULL) is a no-op. Strings returned through
 * char** are released with hlp_string_free.
 */
#ifndef HETEROLP_HETEROLP_H
#define HETEROLP_HETEROLP_H

#include <stddef.h>
#include <stdint.h>

#if defined(HETEROLP_BUILDING)
#define HLP_API __attribute__((visibility("default")))
#else
#define HLP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hlp_status {
  HLP_OK = 0,
  HLP_E_INVALID_ARGUMENT = 1,
  HLP_E_IO = 2,
  HLP_E_PARSE = 3,
  HLP_E_NUMERIC = 4,
  HLP_E_CAPACITY = 5,
  HLP_E_STATE = 6,
  HLP_E_INTERNAL = 99
} hlp_status;

HLP_API const char* hlp_version(void);
HLP_API const char* hlp_status_name(hlp_status status);
/* Message of the last failed call on this thread; "" after a success. */
HLP_API const char* hlp_last_error(void);
HLP_API void hlp_string_free(char* s);

/* Non-fatal diagnostics. NULL restores the default (stderr). */
typedef void (*hlp_warning_fn)(const char* message, void* user);
HLP_API void hlp_set_warning_handler(hlp_warning_fn fn, void* user);

/* Worker threads used internally (HETEROLP_THREADS caps it). */
HLP_API size_t hlp_thread_count(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct hlp_dataset hlp_dataset;

typedef struct hlp_dataset_info {
  size_t num_nodes;
  size_t num_edges; /* undirected */
  size_t num_features;
  int classes;
  double homophily; /* edge homophily of the input graph */
} hlp_dataset_info;

HLP_API hlp_status hlp_dataset_load(const char* manifest_path, hlp_dataset** out);
HLP_API hlp_status hlp_dataset_info_get(const hlp_dataset* d, hlp_dataset_info* out);
/* Writes edges.tsv, labels.txt, features.csv and <stem>.json into dir. */
HLP_API hlp_status hlp_dataset_save(const hlp_dataset* d, const char* dir, const char* stem);
HLP_API void hlp_dataset_free(hlp_dataset* d);

typedef struct hlp_sbm_spec {
  size_t num_nodes;
  int classes;
  double p_intra;
  double p_inter;
  size_t feature_dim;
  double separation;
  double feature_noise;
  uint64_t seed;
} hlp_sbm_spec;

HLP_API void hlp_sbm_spec_default(hlp_sbm_spec* spec);
/* expected_homophily and expected_edges may be NULL. */
HLP_API hlp_status hlp_generate_sbm(const hlp_sbm_spec* spec, hlp_dataset** out, double* expected_homophily,
                                    double* expected_edges);

/* ---- noise ------------------------------------------------------------- */

typedef enum hlp_noise_kind { HLP_NOISE_UNIFORM = 0, HLP_NOISE_FLIP = 1 } hlp_noise_kind;

typedef struct hlp_noise_options {
  hlp_noise_kind kind;
  double rate;
  uint64_t noise_seed;
  /* Flip noise: explicit class map of length `classes`, or NULL. */
  const int* flip_permutation;
  int randomize_flip;
  uint64_t split_seed;
  double train_fraction;
  double val_fraction;
  double clean_fraction;
  int stratify;
  int corrupt_clean;
} hlp_noise_options;

typedef struct hlp_noise_summary {
  size_t clean;
  size_t noisy;
  size_t val;
  size_t test;
  size_t corrupted;
  size_t flipped;
} hlp_noise_summary;

HLP_API void hlp_noise_options_default(hlp_noise_options* opts);
/* Splits, corrupts and writes "node<TAB>role<TAB>label" lines to out_path.
 * summary may be NULL. */
HLP_API hlp_status hlp_inject_noise(const hlp_dataset* d, const hlp_noise_options* opts, const char* out_path,
                                    hlp_noise_summary* summary);

/* ---- one-shot reconstruction and propagation --------------------------- */

/* pipeline_json holds the reconstruct/propagate/train/encoder/ablation
 * sections of a run config; NULL or "" means defaults. */

typedef struct hlp_reconstruct_summary {
  size_t view_k;
  size_t view_edges;
  double view_homophily;
  double input_homophily;
} hlp_reconstruct_summary;

/* Writes the top-k view of S as an edge list. view_k = 0 uses the rounded
 * average degree. */
HLP_API hlp_status hlp_reconstruct(const hlp_dataset* d, const char* observed_path, const char* pipeline_json,
                                   size_t view_k, const char* edges_out, hlp_reconstruct_summary* summary);

typedef struct hlp_propagate_summary {
  size_t iterations;
  double residual;
  double noisy_accuracy; /* argmax of F against the truth on the noisy set */
  double val_accuracy;
  double test_accuracy;
} hlp_propagate_summary;

/* Writes "node<TAB>label<TAB>confidence" for every node. */
HLP_API hlp_status hlp_propagate(const hlp_dataset* d, const char* observed_path, const char* pipeline_json,
                                 const char* predictions_out, hlp_propagate_summary* summary);

/* ---- full runs ---------------------------------------------------------- */

typedef struct hlp_config hlp_config;

/* overrides_json (may be NULL) is merged over the file as a JSON merge patch. */
HLP_API hlp_status hlp_config_load(const char* path, const char* overrides_json, hlp_config** out);
HLP_API hlp_status hlp_config_parse(const char* json_text, const char* base_dir, const char* overrides_json,
                                    hlp_config** out);
/* Every field materialized. */
HLP_API hlp_status hlp_config_to_json(const hlp_config* cfg, char** out);
HLP_API void hlp_config_free(hlp_config* cfg);

typedef struct hlp_run_summary {
  double test_accuracy;
  double val_accuracy;
  double rectification_accuracy;
  double baseline_test_accuracy; /* NaN when the baseline is off */
  double observed_noise;
  size_t rounds;
  double seconds;
} hlp_run_summary;

/* Runs one experiment and writes its artifacts; summary may be NULL. */
HLP_API hlp_status hlp_run(const hlp_config* cfg, hlp_run_summary* summary);

typedef struct hlp_grid_summary {
  size_t runs;
  double mean_test_accuracy;
  double std_test_accuracy;
  double mean_rectification_accuracy;
  double std_rectification_accuracy;
  double mean_baseline_test_accuracy;
  double std_baseline_test_accuracy;
} hlp_grid_summary;

/* One run per seed under output_dir/seed-<s>, up to `jobs` processes. */
HLP_API hlp_status hlp_run_grid(const hlp_config* cfg, const uint64_t* seeds, size_t num_seeds, size_t jobs,
                                hlp_grid_summary* summary);

/* ---- theory ------------------------------------------------------------- */

HLP_API hlp_status hlp_denoise_gap(double e, double p, int degree, double alpha, double prior0, double* out);

typedef struct hlp_theory_grid {
  const double* e;
  size_t num_e;
  const double* p;
  size_t num_p;
  const int* degree;
  size_t num_degree;
  const double* alpha;
  size_t num_alpha;
  double prior0;
} hlp_theory_grid;

/* Writes cell,e,p,d,alpha,analytic,empirical,se,pass rows to csv_out (NULL
 * skips the file). */
HLP_API hlp_status hlp_verify_theory(const hlp_theory_grid* grid, uint64_t trials, uint64_t seed,
                                     double tolerance_se, const char* csv_out, size_t* cells, size_t* failures);

/* ---- scaling ------------------------------------------------------------ */

typedef struct hlp_scaling_options {
  const size_t* sizes;
  size_t num_sizes;
  double average_degree;
  double homophily; /* expected edge homophily, c = 2 */
  size_t feature_dim;
  size_t embed_dim;
  size_t repeats;
  uint64_t seed;
} hlp_scaling_options;

HLP_API void hlp_scaling_options_default(hlp_scaling_options* opts);
/* Writes n,edges,seconds rows to csv_out (NULL skips the file). */
HLP_API hlp_status hlp_bench_scaling(const hlp_scaling_options* opts, const char* csv_out, double* slope);

#ifdef __cplusplus
}
#endif

#endif /* HETEROLP_HETEROLP_H */
