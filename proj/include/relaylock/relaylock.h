/*
 * relaylock C API.
 *
 * Simulation and analysis of mixed-signal relay-feedback resonant oscillators:
 * a second-order resonator sampled by a one-bit comparator, closed through an
 * FIR feedback filter and a hold or pulsed DAC.
 *
 * All objects are opaque handles created by *_create / *_run and released by
 * the matching *_destroy. Every fallible call returns an rl_status; on failure
 * rl_last_error() describes the problem for the calling thread.
 */
#ifndef RELAYLOCK_H_
#define RELAYLOCK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RELAYLOCK_BUILDING)
#    define RELAYLOCK_API __declspec(dllexport)
#  else
#    define RELAYLOCK_API __declspec(dllimport)
#  endif
#else
#  define RELAYLOCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* The first values double as CLI exit codes. */
typedef enum rl_status {
  RL_OK = 0,
  RL_ERROR = 1,
  RL_ERROR_CONFIG = 2,
  RL_ERROR_NO_OSCILLATION = 3,
  RL_ERROR_VALIDATION = 4,
  RL_ERROR_INVALID_ARGUMENT = 5,
  RL_ERROR_NO_SOLUTION = 6,
  RL_ERROR_NUMERIC = 7,
  RL_ERROR_IO = 8
} rl_status;

typedef enum rl_format { RL_FORMAT_CSV = 0, RL_FORMAT_JSON = 1 } rl_format;

typedef struct rl_config rl_config;
typedef struct rl_trace rl_trace;
typedef struct rl_staircase rl_staircase;
typedef struct rl_table rl_table;
typedef struct rl_comparison rl_comparison;
typedef struct rl_report rl_report;

typedef struct rl_period_measurement {
  double mean_period; /* s */
  double jitter;      /* s */
  int locked;
  int64_t ratio_num; /* T / Ts = ratio_num / ratio_den, lowest terms; 0 if unlocked */
  int64_t ratio_den;
  int64_t period_samples;
  int64_t rising_edges;
} rl_period_measurement;

typedef struct rl_staircase_row {
  double omega0;
  double period; /* NaN when no oscillation was detected */
  int64_t ratio_num;
  int64_t ratio_den;
  int locked;
} rl_staircase_row;

typedef struct rl_step_bounds {
  int n_lock;
  double t_target;
  double omega_low;
  double omega_high;
  double width;
  double relative_width;
  double phi0_at_low;
} rl_step_bounds;

typedef struct rl_resolution_row {
  int arch; /* 0 differentiator, 1 pdo, 2 custom */
  int m;
  int big_m;
  double q_factor;
  double oversampling;
  int ok;
  rl_step_bounds bounds; /* zeroed unless ok */
  const char* status;    /* owned by the table */
} rl_resolution_row;

typedef struct rl_comparison_entry {
  int m;
  int big_m;
  double differentiator_relative_width; /* NaN when the row failed */
  double pdo_relative_width;
  const char* verdict; /* "pdo", "differentiator", "tie" or "undecided" */
} rl_comparison_entry;

typedef struct rl_check {
  const char* name;
  int passed;
  const char* detail;
} rl_check;

RELAYLOCK_API const char* rl_version(void);
RELAYLOCK_API const char* rl_last_error(void);
RELAYLOCK_API const char* rl_status_string(rl_status status);

/* Configuration: flat key=value pairs (see README for keys). */
RELAYLOCK_API rl_status rl_config_create(rl_config** out);
RELAYLOCK_API void rl_config_destroy(rl_config* config);
RELAYLOCK_API rl_status rl_config_load_file(rl_config* config, const char* path);
RELAYLOCK_API rl_status rl_config_set(rl_config* config, const char* key, const char* value);
RELAYLOCK_API rl_status rl_config_validate(const rl_config* config);
/* Output path and format the config names (out=, format=). */
RELAYLOCK_API const char* rl_config_output(const rl_config* config);
RELAYLOCK_API rl_format rl_config_format(const rl_config* config);

/* Closed-loop simulation at the configured operating point. */
RELAYLOCK_API rl_status rl_simulate(const rl_config* config, rl_trace** out);
RELAYLOCK_API void rl_trace_destroy(rl_trace* trace);
RELAYLOCK_API size_t rl_trace_length(const rl_trace* trace);
RELAYLOCK_API double rl_trace_ts(const rl_trace* trace);
RELAYLOCK_API rl_status rl_trace_sample(const rl_trace* trace, size_t n, double* w, int* sign,
                                        double* u);
/* skip < 0 and window <= 0 select the configured defaults. */
RELAYLOCK_API rl_status rl_trace_measure(const rl_trace* trace, int64_t skip, int64_t window,
                                         rl_period_measurement* out);
RELAYLOCK_API rl_status rl_trace_write(const rl_trace* trace, const char* path, rl_format format);

/* Sensor response sweep over omega0. */
RELAYLOCK_API rl_status rl_staircase_run(const rl_config* config, rl_staircase** out);
RELAYLOCK_API void rl_staircase_destroy(rl_staircase* staircase);
RELAYLOCK_API size_t rl_staircase_size(const rl_staircase* staircase);
RELAYLOCK_API rl_status rl_staircase_row_at(const rl_staircase* staircase, size_t i,
                                            rl_staircase_row* out);
RELAYLOCK_API rl_status rl_staircase_zoom(const rl_staircase* staircase, double omega_lo,
                                          double omega_hi, rl_staircase** out);
RELAYLOCK_API rl_status rl_staircase_write(const rl_staircase* staircase, const char* path,
                                           rl_format format);

/* Analytical step bounds. */
RELAYLOCK_API rl_status rl_step_bounds_compute(const rl_config* config, rl_step_bounds* out);
RELAYLOCK_API rl_status rl_period_interval(const rl_config* config, double omega0, double* t0,
                                           double* t1);

RELAYLOCK_API rl_status rl_resolution_run(const rl_config* config, rl_table** out);
RELAYLOCK_API void rl_table_destroy(rl_table* table);
RELAYLOCK_API size_t rl_table_size(const rl_table* table);
RELAYLOCK_API rl_status rl_table_row(const rl_table* table, size_t i, rl_resolution_row* out);
RELAYLOCK_API rl_status rl_table_write(const rl_table* table, const char* path, rl_format format);

RELAYLOCK_API rl_status rl_compare_run(const rl_config* config, rl_comparison** out);
RELAYLOCK_API void rl_comparison_destroy(rl_comparison* comparison);
RELAYLOCK_API size_t rl_comparison_size(const rl_comparison* comparison);
RELAYLOCK_API rl_status rl_comparison_entry_at(const rl_comparison* comparison, size_t i,
                                               rl_comparison_entry* out);
RELAYLOCK_API rl_status rl_comparison_write(const rl_comparison* comparison, const char* path,
                                            rl_format format);

/* Simulation / exact solver / harmonic series cross-check. */
RELAYLOCK_API rl_status rl_validate_run(const rl_config* config, rl_report** out);
RELAYLOCK_API void rl_report_destroy(rl_report* report);
RELAYLOCK_API size_t rl_report_size(const rl_report* report);
RELAYLOCK_API rl_status rl_report_check(const rl_report* report, size_t i, rl_check* out);
RELAYLOCK_API int rl_report_passed(const rl_report* report);
RELAYLOCK_API rl_status rl_report_write(const rl_report* report, const char* path,
                                        rl_format format);

#ifdef __cplusplus
}
#endif

#endif /* RELAYLOCK_H_ */
