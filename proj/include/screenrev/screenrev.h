#ifndef SCREENREV_SCREENREV_H
#define SCREENREV_SCREENREV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#    if defined(SCREENREV_BUILDING)
#        define SR_API __declspec(dllexport)
#    else
#        define SR_API __declspec(dllimport)
#    endif
#else
#    define SR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; details via sr_last_error(). */
typedef enum sr_status
{
    SR_OK = 0,
    SR_INVALID_ARGUMENT = 1,
    SR_NEGATIVE_DENSITY = 2,
    SR_MASS_MISMATCH = 3,
    SR_OVERLAPPING_PIECES = 4,
    SR_INFINITE_MEAN = 5,
    SR_EMPTY_TRUNCATION = 6,
    SR_BAD_PARAMS = 7,
    SR_NOT_A_CDF = 8,
    SR_ZERO_EVIDENCE = 9,
    SR_BAD_CUTOFFS = 10,
    SR_NOT_AN_INTERVAL = 11,
    SR_ZERO_DENSITY = 12,
    SR_NO_THRESHOLD = 13,
    SR_ACCEPTANCE_STARVED = 14,
    SR_CONFIG_ERROR = 15,
    SR_IO_ERROR = 16,
    SR_UNSUPPORTED = 17,
    SR_INTERNAL = 100
} sr_status;

typedef struct sr_distribution sr_distribution;
typedef struct sr_kernel sr_kernel;
typedef struct sr_threshold sr_threshold;
typedef struct sr_posterior sr_posterior;

SR_API const char* sr_version(void);
SR_API const char* sr_status_name(sr_status status);
/* Message of the last failed call on this thread; empty after success */
SR_API const char* sr_last_error(void);

/* ---- Distributions ---------------------------------------------------- */

/* Parse the text schema; evidence receives NaN when the text has none (may be NULL) */
SR_API sr_status sr_distribution_parse(const char* text, sr_distribution** out, double* evidence);
/* Named family: uniform, exponential, pareto, normal, footnote_mixture */
SR_API sr_status sr_distribution_named(const char* name, const double* params, size_t n_params,
                                       sr_distribution** out);
SR_API void sr_distribution_free(sr_distribution* d);

SR_API sr_status sr_distribution_cdf(const sr_distribution* d, double x, double* out);
SR_API sr_status sr_distribution_cdf_left(const sr_distribution* d, double x, double* out);
SR_API sr_status sr_distribution_density(const sr_distribution* d, double x, double* out);
SR_API sr_status sr_distribution_atom(const sr_distribution* d, double x, double* out);
SR_API sr_status sr_distribution_mean(const sr_distribution* d, double* out);
SR_API sr_status sr_distribution_quantile(const sr_distribution* d, double p, double* out);
SR_API sr_status sr_distribution_support(const sr_distribution* d, double* lo, double* hi);
SR_API sr_status sr_distribution_truncate(const sr_distribution* d, double lo, double hi, sr_distribution** out);
SR_API sr_status sr_distribution_discarded_mass(const sr_distribution* d, double* out);
/* Writes at most cap bytes including the terminator; needed gets the full length + 1 */
SR_API sr_status sr_distribution_to_text(const sr_distribution* d, char* buf, size_t cap, size_t* needed);

/* ---- Kernels ---------------------------------------------------------- */

typedef double (*sr_probability_fn)(double x, void* user);

SR_API sr_status sr_kernel_triangle_rectangle(sr_kernel** out);
SR_API sr_status sr_kernel_three_piece(double iota, double xi, sr_kernel** out);
SR_API sr_status sr_kernel_additive(const sr_distribution* noise, sr_kernel** out);
SR_API sr_status sr_kernel_evasion_constant(double p, const sr_distribution* g, sr_kernel** out);
SR_API sr_status sr_kernel_evasion_logistic(double k, double x0, const sr_distribution* g, sr_kernel** out);
/* fn must stay valid and pure for the lifetime of the kernel */
SR_API sr_status sr_kernel_evasion_callback(sr_probability_fn fn, void* user, const sr_distribution* g,
                                            sr_kernel** out);
SR_API sr_status sr_kernel_reflect(const sr_kernel* k, sr_kernel** out);
SR_API void sr_kernel_free(sr_kernel* k);

/* Continuous part of f(z | x) */
SR_API sr_status sr_kernel_density(const sr_kernel* k, double z, double x, double* out);
/* Point mass P(Z = z | x) */
SR_API sr_status sr_kernel_atom_mass(const sr_kernel* k, double z, double x, double* out);
SR_API sr_status sr_kernel_noise_range(const sr_kernel* k, double* lo, double* hi);

/* ---- Threshold signals ------------------------------------------------ */

SR_API sr_status sr_threshold_transform(const sr_kernel* k, sr_threshold** out);
SR_API void sr_threshold_free(sr_threshold* t);
/* P(S <= s | x) */
SR_API sr_status sr_threshold_cdf(const sr_threshold* t, double s, double x, double* out);
SR_API sr_status sr_threshold_terminal_atom(const sr_threshold* t, double* out);

/* ---- Posteriors ------------------------------------------------------- */

SR_API sr_status sr_posterior_point(const sr_distribution* prior, const sr_kernel* k, double z, sr_posterior** out);
SR_API sr_status sr_posterior_threshold(const sr_distribution* prior, const sr_threshold* t, double b,
                                        sr_posterior** out);
SR_API sr_status sr_posterior_threshold_additive(const sr_distribution* prior, const sr_distribution* noise,
                                                 double b, sr_posterior** out);
SR_API sr_status sr_posterior_threshold_kernel(const sr_distribution* prior, const sr_kernel* k, double b,
                                               sr_posterior** out);
SR_API void sr_posterior_free(sr_posterior* p);
SR_API sr_status sr_posterior_evidence(const sr_posterior* p, double* out);
/* New handle holding a copy of the posterior law */
SR_API sr_status sr_posterior_distribution(const sr_posterior* p, sr_distribution** out);

/* ---- Ordering --------------------------------------------------------- */

typedef enum sr_fosd_relation
{
    SR_FOSD_STRICT_DOMINATES = 0,
    SR_FOSD_WEAK_DOMINATES = 1,
    SR_FOSD_EQUAL = 2,
    SR_FOSD_DOMINATED = 3,
    SR_FOSD_INCOMPARABLE = 4
} sr_fosd_relation;

typedef struct sr_fosd_verdict
{
    sr_fosd_relation relation;
    double max_gap_pos;
    double max_gap_neg;
    double min_interior_gap;
    double tol;
    size_t n_probes;
    double witnesses[3];
    size_t n_witnesses;
} sr_fosd_verdict;

/* tol <= 0 and grid <= 0 pick the defaults (1e-9, 10000) */
SR_API sr_status sr_fosd_compare(const sr_distribution* d1, const sr_distribution* d2, double tol, int grid,
                                 sr_fosd_verdict* out);

/* values and evidences receive n entries each (evidences may be NULL) */
SR_API sr_status sr_screening_curve_threshold(const sr_distribution* prior, const sr_threshold* t,
                                              const double* cutoffs, size_t n, double* values, double* evidences);
SR_API sr_status sr_screening_curve_additive(const sr_distribution* prior, const sr_distribution* noise,
                                             const double* cutoffs, size_t n, double* values, double* evidences);
SR_API sr_status sr_screening_curve_kernel(const sr_distribution* prior, const sr_kernel* k,
                                           const double* cutoffs, size_t n, double* values, double* evidences);

typedef struct sr_reversal
{
    size_t i;
    size_t j;
    double gap;
} sr_reversal;

/* Writes up to cap reversals (largest gap first); count gets the total */
SR_API sr_status sr_detect_reversals(const double* cutoffs, const double* values, size_t n, double tol,
                                     sr_reversal* out, size_t cap, size_t* count);

/* ---- Structural checks ------------------------------------------------ */

typedef enum sr_ruleout_trigger
{
    SR_RULEOUT_NONE = 0,
    SR_RULEOUT_LEMMA_HIGH_VALUES = 1,
    SR_RULEOUT_LEMMA_LOW_VALUES = 2,
    SR_RULEOUT_COROLLARY_I = 3,
    SR_RULEOUT_COROLLARY_II = 4,
    SR_RULEOUT_COROLLARY_III = 5
} sr_ruleout_trigger;

typedef struct sr_ruleout_verdict
{
    int precluded;
    sr_ruleout_trigger trigger;
    double witness_lo;
    double witness_hi;
    int witness_lo_closed;
    int witness_hi_closed;
    double witness_mass;
} sr_ruleout_verdict;

SR_API sr_status sr_ruleout_lemma(const sr_distribution* prior, double noise_lo, double noise_hi, double z1,
                                  double z2, sr_ruleout_verdict* out);
SR_API sr_status sr_ruleout_corollary(const sr_distribution* prior, double noise_lo, double noise_hi,
                                      sr_ruleout_verdict* out);

/* d ln f(z | x) / dz; step <= 0 picks the default. finite_difference may be NULL */
SR_API sr_status sr_loglik_slope(const sr_kernel* k, double z, double x, double step, double* value,
                                 double* finite_difference);

typedef enum sr_monotonicity
{
    SR_STRICTLY_DECREASING = 0,
    SR_WEAKLY_DECREASING = 1,
    SR_VIOLATED = 2
} sr_monotonicity;

/* violations may be NULL */
SR_API sr_status sr_check_h_monotone(const sr_kernel* k, double z, const double* x_grid, size_t n,
                                     sr_monotonicity* out, size_t* violations);
SR_API sr_status sr_posterior_z_derivative(const sr_distribution* prior, const sr_kernel* k, double w, double z,
                                           double step, double* out);
/* grid <= 0 picks 10000; strict may be NULL */
SR_API sr_status sr_noise_threshold(const sr_distribution* noise, int grid, double* eps_hat, int* strict);
SR_API sr_status sr_tax_zbar(const sr_distribution* prior, const sr_kernel* k, const double* w_grid, size_t n_w,
                             double z_max, int n_scan, double* lower_bound, int* unbounded);

/* ---- Monte Carlo oracle ----------------------------------------------- */

typedef enum sr_band_side
{
    SR_BAND_CENTERED = 0,
    SR_BAND_LEFT = 1,
    SR_BAND_RIGHT = 2
} sr_band_side;

typedef struct sr_mc_stats
{
    uint64_t proposed;
    uint64_t accepted;
} sr_mc_stats;

SR_API double sr_dkw_band(size_t n, double confidence);

/* Draws of X given Z in a band around z; samples receives n sorted values. stats may be NULL */
SR_API sr_status sr_sample_point(const sr_distribution* prior, const sr_kernel* k, double z, double bandwidth,
                                 sr_band_side side, size_t n, uint64_t seed, double* samples, sr_mc_stats* stats);
/* Draws of X given Z >= b */
SR_API sr_status sr_sample_threshold_kernel(const sr_distribution* prior, const sr_kernel* k, double b, size_t n,
                                            uint64_t seed, double* samples, sr_mc_stats* stats);
/* Draws of X given S >= b */
SR_API sr_status sr_sample_threshold(const sr_distribution* prior, const sr_threshold* t, double b, size_t n,
                                     uint64_t seed, double* samples, sr_mc_stats* stats);

typedef struct sr_oracle_result
{
    double sup_gap;
    double band;
    double window_gap;
    int pass;
} sr_oracle_result;

/* samples must be sorted; windows is n_windows (lo, hi) pairs and may be NULL */
SR_API sr_status sr_oracle_compare(const double* samples, size_t n, const sr_distribution* analytic,
                                   double confidence, const double* windows, size_t n_windows,
                                   sr_oracle_result* out);

/* ---- Scenarios -------------------------------------------------------- */

SR_API size_t sr_builtin_count(void);
/* NULL when i is out of range */
SR_API const char* sr_builtin_name(size_t i);

typedef struct sr_run_options
{
    const char* out_dir;
    /* Overrides; grid <= 0, tol <= 0 and mc_n == 0 keep the scenario values */
    int grid;
    double tol;
    uint64_t mc_n;
    int override_seed;
    uint64_t seed;
    int timestamp;
} sr_run_options;

SR_API void sr_run_options_default(sr_run_options* options);

/*
 * Run a builtin name or config path and write its report directory.
 * passed gets 1 when every check passes. summary receives the verdict
 * lines (may be NULL with cap 0); needed gets the full length + 1.
 */
SR_API sr_status sr_run_scenario(const char* target, const sr_run_options* options, int* passed, char* summary,
                                 size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
