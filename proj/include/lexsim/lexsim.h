/* lexsim C interface.
 *
 * All handles are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Functions return LX_OK or an error
 * status; lx_last_error() then describes the failure (per thread).
 *
 * Money amounts and fractions cross the boundary as decimal strings so no
 * precision is lost. Percent fields take percent text ("1.129" == 1.129%).
 */
#ifndef LEXSIM_H
#define LEXSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LX_API __declspec(dllexport)
#else
#define LX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lx_status {
  LX_OK = 0,
  LX_E_INVALID_ARGUMENT,
  LX_E_NEGATIVE_VALUE,
  LX_E_TIMESTAMP_ORDER,
  LX_E_DUPLICATE_ID,
  LX_E_UNKNOWN_CHAIN,
  LX_E_EMPTY_ADDRESS,
  LX_E_FILE_MISSING,
  LX_E_SCHEMA_MISMATCH,
  LX_E_ROW_REJECTED,
  LX_E_DUPLICATE_KEY,
  LX_E_NON_POSITIVE_PRICE,
  LX_E_MISSING_PRICE,
  LX_E_INVALID_PROFILE,
  LX_E_NEGATIVE_BALANCE,
  LX_E_OUT_OF_RANGE,
  LX_E_INSUFFICIENT_HISTORY,
  LX_E_EMPTY_COMPETING_SET,
  LX_E_EMPTY_ROUTE,
  LX_E_GRID_TOO_LARGE,
  LX_E_IO_FAILURE,
  LX_E_INTERNAL = 99
} lx_status;

typedef enum lx_format { LX_FORMAT_DELIMITED = 0, LX_FORMAT_RECORD_STREAM = 1, LX_FORMAT_ALIGNED_TABLE = 2 } lx_format;
typedef enum lx_mode { LX_MODE_RATIONAL = 0, LX_MODE_BYZANTINE = 1 } lx_mode;
typedef enum lx_window_mode { LX_WINDOW_CAUSAL = 0, LX_WINDOW_FULL_PERIOD = 1 } lx_window_mode;
typedef enum lx_scope { LX_SCOPE_TOTAL = 0, LX_SCOPE_PER_SOLVER = 1, LX_SCOPE_CLASS = 2 } lx_scope;

typedef struct lx_dataset lx_dataset;
typedef struct lx_schedule lx_schedule;
typedef struct lx_results lx_results;

LX_API const char* lx_version(void);
LX_API const char* lx_status_name(lx_status status);
/* Message of the last failed call on this thread ("" when none). */
LX_API const char* lx_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct lx_load_options {
  const char* traces_path;     /* required */
  lx_format traces_format;     /* delimited or record-stream */
  char delimiter;              /* delimited files; default ',' */
  const char* events_path;     /* liquidity events; required */
  const char* balances_path;   /* origin balances; NULL = all zero */
  const char* prices_path;     /* NULL = input_amount_usd must be present */
  int has_origin_time;
  int64_t origin_time;
  double max_rejection_ratio;  /* default 0.05 */
} lx_load_options;

LX_API void lx_load_options_init(lx_load_options* options);
LX_API lx_status lx_dataset_load(const lx_load_options* options, lx_dataset** out);
/* `profile` is a preset name (debridge, across, mayan) or a JSON profile path. */
LX_API lx_status lx_dataset_synthesize(const char* profile, int64_t duration_s, uint64_t seed, lx_dataset** out);
/* Writes traces (delimited), events and origin balances; NULL paths are skipped. */
LX_API lx_status lx_dataset_write(const lx_dataset* ds, const char* traces_path, const char* events_path,
                                  const char* balances_path);
LX_API size_t lx_dataset_intent_count(const lx_dataset* ds);
LX_API size_t lx_dataset_rejected_count(const lx_dataset* ds);
LX_API size_t lx_dataset_solver_count(const lx_dataset* ds);
LX_API void lx_dataset_coverage(const lx_dataset* ds, int64_t* start, int64_t* end);
/* Total liquidity L(t) as decimal text into buf (NUL-terminated). */
LX_API lx_status lx_dataset_liquidity_at(const lx_dataset* ds, int64_t t, char* buf, size_t buf_len);
/* Route with the most intents, as bridge / src / dst labels. */
LX_API lx_status lx_dataset_busiest_route(const lx_dataset* ds, char* bridge, char* src, char* dst, size_t len);
LX_API void lx_dataset_free(lx_dataset* ds);

/* ---- schedules --------------------------------------------------------- */

typedef struct lx_trigger_config {
  unsigned k;                        /* default 1 */
  lx_window_mode window_mode;        /* default causal */
  lx_scope scope;                    /* default total */
  int64_t cooldown_s;                /* default 1000 */
  int cooldown_follows_window;       /* sweeps: cooldown = W (default 1) */
  int64_t sample_resolution_s;       /* default 60 */
  int64_t warmup_s;                  /* default 0 */
  int has_from, has_to;
  int64_t from, to;                  /* default: dataset coverage */
  /* Intent class for LX_SCOPE_CLASS. */
  const char* class_bridge;
  const char* class_token;           /* NULL = any */
  const char* class_value_min;       /* NULL = unbounded */
  const char* class_value_max;
  const char* const* competing;      /* "address@chain"; none = infer from the trace */
  size_t n_competing;
  const char* const* excluded;       /* removed from an inferred set */
  size_t n_excluded;
} lx_trigger_config;

LX_API void lx_trigger_config_init(lx_trigger_config* config);
LX_API lx_status lx_triggers(const lx_dataset* ds, const lx_trigger_config* config, lx_schedule** out);
/* Attack placements at fixed timestamps (alpha = 1). */
LX_API lx_status lx_schedule_fixed(const lx_dataset* ds, const int64_t* times, size_t n, lx_schedule** out);
LX_API size_t lx_schedule_size(const lx_schedule* s);
LX_API lx_status lx_schedule_get(const lx_schedule* s, size_t i, int64_t* at, double* alpha, double* liquidity);
/* NULL or "-" writes to stdout. */
LX_API lx_status lx_schedule_write(const lx_schedule* s, const char* path);
/* (t, L(t)) step series plus trigger markers. */
LX_API lx_status lx_schedule_write_plot(const lx_dataset* ds, const lx_schedule* s, const char* path);
LX_API void lx_schedule_free(lx_schedule* s);

/* ---- simulation -------------------------------------------------------- */

typedef struct lx_attack_config {
  const char* bridge;                 /* required */
  const char* src_chain;              /* required */
  const char* dst_chain;              /* required */
  int64_t attack_window_s;            /* default 1000 */
  const char* max_tx_value;           /* default "10000" */
  const char* volume_multiplier;      /* default "1" */
  const char* solver_profit_percent;  /* NULL = historical */
  const char* protocol_fee_percent;   /* NULL = historical */
  const char* epsilon_model;          /* "zero" (default), "fixed", "bps" */
  const char* epsilon_value;          /* USD for fixed, integer bps for bps */
  const char* flood_gas_usd;          /* NULL = trailing 24 h median */
  lx_mode mode;
} lx_attack_config;

LX_API void lx_attack_config_init(lx_attack_config* config);

typedef struct lx_sweep_axes {
  const unsigned* k;
  size_t n_k;
  const int64_t* attack_window_s;
  size_t n_attack_window;
  const char* const* solver_profit_percent; /* NULL entries = historical */
  size_t n_solver_profit;
  const char* const* protocol_fee_percent;
  size_t n_protocol_fee;
  const char* const* max_tx_value;
  size_t n_max_tx_value;
  const char* const* volume_multiplier;
  size_t n_volume_multiplier;
  size_t max_cells;                         /* default 10000 */
} lx_sweep_axes;

/* Axes left empty take the single value from the base config / trigger config. */
LX_API void lx_sweep_axes_init(lx_sweep_axes* axes);

typedef struct lx_run_options {
  uint64_t seed;
  unsigned threads;       /* 0 = hardware concurrency */
  const int64_t* fixed_times; /* non-NULL: fixed placements instead of triggers */
  size_t n_fixed_times;
} lx_run_options;

LX_API void lx_run_options_init(lx_run_options* options);

LX_API lx_status lx_sweep(const lx_dataset* ds, const lx_attack_config* base, const lx_sweep_axes* axes,
                          const lx_trigger_config* triggers, const lx_run_options* options, lx_results** out);
/* Single configuration: a one-cell sweep. */
LX_API lx_status lx_simulate(const lx_dataset* ds, const lx_attack_config* config, const lx_trigger_config* triggers,
                             const lx_run_options* options, lx_results** out);

typedef struct lx_cell_summary {
  char fingerprint[17];
  unsigned k;
  int64_t attack_window_s;
  int64_t n_attacks;
  /* rational */
  double mean_net_profit;
  double std_net_profit;
  double p90_net_profit;
  double pr_profit;
  double mean_n_fulfillments;
  double mean_volume_fulfilled;
  double median_induction_cost;
  int reliable_attack;
  /* byzantine */
  double mean_failed_intents;
  double median_failed_value;
  double median_missed_solver_profit;
  double median_missed_protocol_fees;
  double median_total_cost;
} lx_cell_summary;

LX_API size_t lx_results_cell_count(const lx_results* r);
LX_API lx_status lx_results_cell(const lx_results* r, size_t i, lx_cell_summary* out);
/* Aggregate table sorted by fingerprint, with a provenance header. */
LX_API lx_status lx_results_emit(const lx_results* r, const char* path, lx_format format);
/* Per-instance rows of one cell (rational instances or byzantine impacts). */
LX_API lx_status lx_results_write_instances(const lx_results* r, size_t cell, const char* path, lx_format format);
LX_API void lx_results_free(lx_results* r);

#ifdef __cplusplus
}
#endif

#endif /* LEXSIM_H */
