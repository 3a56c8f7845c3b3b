/* C interface to the garchre library. Objects are opaque handles released by
 * their *_free function; every fallible call returns a garchre_status and
 * leaves a message for garchre_last_error() on failure. Strings returned
 * through char** are owned by the caller and released with garchre_string_free.
 *
 * `provenance` arguments are newline-separated lines written as '#' comments
 * at the top of CSV files (or a "provenance" array in JSON). May be NULL. */
#ifndef GARCHRE_H
#define GARCHRE_H

#include <stddef.h>
#include <stdint.h>

#if defined(GARCHRE_BUILDING_LIBRARY)
#define GARCHRE_API __attribute__((visibility("default")))
#else
#define GARCHRE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum garchre_status {
  GARCHRE_OK = 0,
  GARCHRE_ERR_INVALID_ARGUMENT = 1,
  GARCHRE_ERR_IO = 2,
  GARCHRE_ERR_PARSE = 3,
  GARCHRE_ERR_VALIDATION = 4,
  GARCHRE_ERR_INSUFFICIENT_DATA = 5,
  GARCHRE_ERR_DOMAIN = 6,
  GARCHRE_ERR_NUMERICAL = 7,
  GARCHRE_ERR_ADAPTATION = 8,
  GARCHRE_ERR_INTERNAL = 9
} garchre_status;

typedef enum garchre_model { GARCHRE_MODEL_N = 0, GARCHRE_MODEL_RE = 1 } garchre_model;

/* Message of the last failure on the calling thread; "" when none. */
GARCHRE_API const char* garchre_last_error(void);
GARCHRE_API void garchre_string_free(char* s);
GARCHRE_API const char* garchre_version(void);

GARCHRE_API garchre_status garchre_parse_model(const char* name, garchre_model* out);
GARCHRE_API const char* garchre_model_name(garchre_model model);

/* ---- daily returns ---- */
typedef struct garchre_returns garchre_returns;

/* Close-to-close log returns from a `date,close` CSV. */
GARCHRE_API garchre_status garchre_returns_load_prices(const char* path, garchre_returns** out);
GARCHRE_API garchre_status garchre_returns_from_values(const double* values, size_t count, garchre_returns** out);
GARCHRE_API size_t garchre_returns_size(const garchre_returns* r);
/* Copies min(capacity, size) values. */
GARCHRE_API size_t garchre_returns_copy(const garchre_returns* r, double* out, size_t capacity);
GARCHRE_API void garchre_returns_free(garchre_returns* r);

/* ---- session calendar and ticks ---- */
typedef struct garchre_calendar garchre_calendar;
typedef struct garchre_ticks garchre_ticks;

GARCHRE_API garchre_status garchre_calendar_tokyo(garchre_calendar** out);
GARCHRE_API garchre_status garchre_calendar_load(const char* path, garchre_calendar** out);
GARCHRE_API void garchre_calendar_free(garchre_calendar* c);

/* `timestamp,price` CSV. */
GARCHRE_API garchre_status garchre_ticks_load(const char* path, garchre_ticks** out);
GARCHRE_API size_t garchre_ticks_size(const garchre_ticks* t);
/* Log returns between the last ticks of consecutive trading days. */
GARCHRE_API garchre_status garchre_ticks_daily_returns(const garchre_ticks* t, const garchre_calendar* c,
                                                       garchre_returns** out);
GARCHRE_API void garchre_ticks_free(garchre_ticks* t);

/* ---- posterior chains ---- */
typedef struct garchre_chain_config {
  size_t burn_in;
  size_t samples;
  size_t adapt_interval;
  double nu;
  uint64_t seed;
  int has_init_variance; /* 0: sample variance of the returns */
  double init_variance;
} garchre_chain_config;

typedef struct garchre_chain garchre_chain;

/* 6000 burn-in, 50000 samples, refit every 500, nu = 10, seed 1. */
GARCHRE_API void garchre_chain_config_init(garchre_chain_config* config);
GARCHRE_API garchre_status garchre_chain_run(garchre_model model, const garchre_returns* returns,
                                             const garchre_chain_config* config, garchre_chain** out);
GARCHRE_API size_t garchre_chain_parameter_count(const garchre_chain* chain);
GARCHRE_API size_t garchre_chain_sample_count(const garchre_chain* chain);
GARCHRE_API double garchre_chain_acceptance_rate(const garchre_chain* chain);
GARCHRE_API garchre_status garchre_chain_parameter(const garchre_chain* chain, size_t index, double* mean, double* sd,
                                                   double* tau_int);
GARCHRE_API garchre_status garchre_chain_write_samples(const garchre_chain* chain, const char* path,
                                                       const char* provenance);
/* Summary JSON for the returns the chain was fitted to. */
GARCHRE_API garchre_status garchre_chain_summary_json(const garchre_chain* chain, const garchre_returns* returns,
                                                      int literal_aic, const char* provenance, char** out);
GARCHRE_API garchre_status garchre_chain_table(const garchre_chain* chain, char** out);
/* Posterior-mean conditional variance per return date, `date,variance`. */
GARCHRE_API garchre_status garchre_chain_write_volatility(const garchre_chain* chain, const garchre_returns* returns,
                                                          const char* path, const char* provenance);
GARCHRE_API void garchre_chain_free(garchre_chain* chain);

/* ---- model comparison ---- */
/* Compares two summary JSON documents. Refuses (GARCHRE_ERR_VALIDATION) when
 * they were fitted to different data. */
GARCHRE_API garchre_status garchre_compare_summaries(const char* first_json, const char* second_json,
                                                     int literal_aic, char** json_out, char** table_out);

/* ---- realized volatility ---- */
/* Writes rv_<delta>.csv per delta, signature.csv and hl_factor.csv into
 * out_dir. `daily` may be NULL, in which case no HL factors are computed. */
GARCHRE_API garchre_status garchre_rv_run(const garchre_ticks* ticks, const garchre_calendar* calendar,
                                          const garchre_returns* daily, const int64_t* deltas, size_t delta_count,
                                          const char* out_dir, const char* provenance);

/* RMSPE against c(delta)-adjusted RV for each volatility CSV (as written by
 * garchre_chain_write_volatility), labelled by `labels`. Writes a
 * `delta_seconds,hl_factor,rmspe_<label>...` CSV to out_path. */
GARCHRE_API garchre_status garchre_rmspe_run(const garchre_ticks* ticks, const garchre_calendar* calendar,
                                             const garchre_returns* daily, const char* const* volatility_paths,
                                             const char* const* labels, size_t model_count, const int64_t* deltas,
                                             size_t delta_count, int literal_rmspe, const char* out_path,
                                             const char* provenance);

/* ---- simulation ---- */
typedef struct garchre_sim_spec {
  garchre_model model;
  double omega;
  double alpha;
  double beta;
  double a; /* rational shape, ignored for GARCHRE_MODEL_N */
  size_t days;
  size_t steps_per_day; /* 0: daily prices only */
  double noise_variance;
  double overnight_fraction;
  double initial_price;
} garchre_sim_spec;

/* GARCH-RE (1.3e-5, 0.148, 0.836, a = 1.57), 500 days, 3240 steps per day, no noise. */
GARCHRE_API void garchre_sim_spec_init(garchre_sim_spec* spec);
/* Writes daily.csv, ticks.csv (when steps_per_day > 0) and truth.csv into out_dir.
 * `calendar` may be NULL for the Tokyo sessions. */
GARCHRE_API garchre_status garchre_simulate(const garchre_sim_spec* spec, const garchre_calendar* calendar,
                                            uint64_t seed, const char* out_dir, const char* provenance);

#ifdef __cplusplus
}
#endif

#endif
