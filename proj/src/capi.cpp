#include "relaylock/relaylock.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "ct_equiv.hpp"
#include "emit.hpp"
#include "error.hpp"
#include "resolution.hpp"
#include "run_config.hpp"
#include "staircase.hpp"
#include "validation.hpp"

struct rl_config {
  relaylock::RunConfig cfg;
};

struct rl_trace {
  relaylock::SimTrace trace;
  std::int64_t skip = 0;
  std::int64_t window = 0;
};

struct rl_staircase {
  relaylock::StaircaseDataset ds;
};

struct rl_table {
  relaylock::ResolutionTable table;
};

struct rl_comparison {
  relaylock::ComparisonReport report;
};

struct rl_report {
  relaylock::ValidationReport report;
};

namespace {

using relaylock::Error;
using relaylock::ErrorCode;

thread_local std::string g_last_error;

rl_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return RL_ERROR_INVALID_ARGUMENT;
    case ErrorCode::Config: return RL_ERROR_CONFIG;
    case ErrorCode::NoOscillation: return RL_ERROR_NO_OSCILLATION;
    case ErrorCode::NoSolution: return RL_ERROR_NO_SOLUTION;
    case ErrorCode::Degenerate: return RL_ERROR_NO_SOLUTION;
    case ErrorCode::Numeric: return RL_ERROR_NUMERIC;
    case ErrorCode::Validation: return RL_ERROR_VALIDATION;
    case ErrorCode::Io: return RL_ERROR_IO;
  }
  return RL_ERROR;
}

template <class Fn>
rl_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return RL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RL_ERROR;
  }
}

rl_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be null";
  return RL_ERROR_INVALID_ARGUMENT;
}

relaylock::OutputFormat to_format(rl_format f) {
  return f == RL_FORMAT_JSON ? relaylock::OutputFormat::Json : relaylock::OutputFormat::Csv;
}

// Validated config: the C entry points run the same checks as the CLI.
const relaylock::RunConfig& checked(const rl_config* c) {
  c->cfg.validate();
  return c->cfg;
}

}  // namespace

extern "C" {

const char* rl_version(void) { return "1.0.0"; }

const char* rl_last_error(void) { return g_last_error.c_str(); }

const char* rl_status_string(rl_status status) {
  switch (status) {
    case RL_OK: return "ok";
    case RL_ERROR: return "error";
    case RL_ERROR_CONFIG: return "configuration error";
    case RL_ERROR_NO_OSCILLATION: return "no oscillation detected";
    case RL_ERROR_VALIDATION: return "validation failed";
    case RL_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case RL_ERROR_NO_SOLUTION: return "no periodic solution";
    case RL_ERROR_NUMERIC: return "numerical failure";
    case RL_ERROR_IO: return "i/o error";
  }
  return "unknown status";
}

rl_status rl_config_create(rl_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new rl_config(); });
}

void rl_config_destroy(rl_config* config) { delete config; }

rl_status rl_config_load_file(rl_config* config, const char* path) {
  if (!config || !path) return null_argument("config and path");
  return guarded([&] { config->cfg.load_file(path); });
}

rl_status rl_config_set(rl_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_argument("config, key and value");
  return guarded([&] { config->cfg.set(key, value); });
}

rl_status rl_config_validate(const rl_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { config->cfg.validate(); });
}

const char* rl_config_output(const rl_config* config) {
  return config ? config->cfg.out.c_str() : "-";
}

rl_format rl_config_format(const rl_config* config) {
  return config && config->cfg.format == relaylock::OutputFormat::Json ? RL_FORMAT_JSON
                                                                        : RL_FORMAT_CSV;
}

rl_status rl_simulate(const rl_config* config, rl_trace** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    const auto loop = cfg.loop_config();
    auto* t = new rl_trace{relaylock::simulate(loop), loop.transient_skip, cfg.window};
    *out = t;
  });
}

void rl_trace_destroy(rl_trace* trace) { delete trace; }

size_t rl_trace_length(const rl_trace* trace) { return trace ? trace->trace.signs.size() : 0; }

double rl_trace_ts(const rl_trace* trace) { return trace ? trace->trace.ts : std::nan(""); }

rl_status rl_trace_sample(const rl_trace* trace, size_t n, double* w, int* sign, double* u) {
  if (!trace) return null_argument("trace");
  if (n >= trace->trace.signs.size()) {
    g_last_error = "sample index out of range";
    return RL_ERROR_INVALID_ARGUMENT;
  }
  if (w) *w = trace->trace.sampled_w[n];
  if (sign) *sign = trace->trace.signs[n];
  if (u) *u = trace->trace.u[n];
  return RL_OK;
}

rl_status rl_trace_measure(const rl_trace* trace, int64_t skip, int64_t window,
                           rl_period_measurement* out) {
  if (!trace || !out) return null_argument("trace and out");
  return guarded([&] {
    const auto m = relaylock::measure_period(trace->trace, skip < 0 ? trace->skip : skip,
                                             window <= 0 ? trace->window : window);
    *out = rl_period_measurement{m.mean_period,
                                 m.jitter,
                                 m.locked ? 1 : 0,
                                 m.lock_ratio ? m.lock_ratio->samples : 0,
                                 m.lock_ratio ? m.lock_ratio->edges : 0,
                                 m.period_samples,
                                 m.rising_edges};
  });
}

rl_status rl_trace_write(const rl_trace* trace, const char* path, rl_format format) {
  if (!trace || !path) return null_argument("trace and path");
  return guarded([&] {
    relaylock::write_to_path(path, [&](std::ostream& os) {
      relaylock::write_trace(os, trace->trace, to_format(format));
    });
  });
}

rl_status rl_staircase_run(const rl_config* config, rl_staircase** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    const auto [lo, hi] = cfg.sweep_range();
    *out = new rl_staircase{relaylock::staircase_sweep(cfg.arch, lo, hi, cfg.points, cfg.policy,
                                                       cfg.sim_settings())};
  });
}

void rl_staircase_destroy(rl_staircase* staircase) { delete staircase; }

size_t rl_staircase_size(const rl_staircase* staircase) {
  return staircase ? staircase->ds.rows.size() : 0;
}

rl_status rl_staircase_row_at(const rl_staircase* staircase, size_t i, rl_staircase_row* out) {
  if (!staircase || !out) return null_argument("staircase and out");
  if (i >= staircase->ds.rows.size()) {
    g_last_error = "row index out of range";
    return RL_ERROR_INVALID_ARGUMENT;
  }
  const auto& r = staircase->ds.rows[i];
  *out = rl_staircase_row{r.omega0, r.mean_period, r.ratio_num(), r.ratio_den(), r.locked ? 1 : 0};
  return RL_OK;
}

rl_status rl_staircase_zoom(const rl_staircase* staircase, double omega_lo, double omega_hi,
                            rl_staircase** out) {
  if (!staircase || !out) return null_argument("staircase and out");
  return guarded([&] { *out = new rl_staircase{relaylock::zoom(staircase->ds, omega_lo, omega_hi)}; });
}

rl_status rl_staircase_write(const rl_staircase* staircase, const char* path, rl_format format) {
  if (!staircase || !path) return null_argument("staircase and path");
  return guarded([&] {
    relaylock::write_to_path(path, [&](std::ostream& os) {
      relaylock::write_staircase(os, staircase->ds, to_format(format));
    });
  });
}

rl_status rl_step_bounds_compute(const rl_config* config, rl_step_bounds* out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    const auto b = relaylock::step_bounds(cfg.arch, cfg.n_lock);
    *out = rl_step_bounds{b.n_lock, b.t_target, b.omega_low, b.omega_high,
                          b.width,  b.relative_width, b.phi0_at_low};
  });
}

rl_status rl_period_interval(const rl_config* config, double omega0, double* t0, double* t1) {
  if (!config || !t0 || !t1) return null_argument("config, t0 and t1");
  return guarded([&] {
    const auto iv = relaylock::period_interval(checked(config).arch, omega0);
    *t0 = iv.t0();
    *t1 = iv.t1();
  });
}

rl_status rl_resolution_run(const rl_config* config, rl_table** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    *out = new rl_table{
        relaylock::resolution_curve(cfg.arch, cfg.m_values, cfg.resolved_big_m_values())};
  });
}

void rl_table_destroy(rl_table* table) { delete table; }

size_t rl_table_size(const rl_table* table) { return table ? table->table.size() : 0; }

rl_status rl_table_row(const rl_table* table, size_t i, rl_resolution_row* out) {
  if (!table || !out) return null_argument("table and out");
  if (i >= table->table.size()) {
    g_last_error = "row index out of range";
    return RL_ERROR_INVALID_ARGUMENT;
  }
  const auto& r = table->table[i];
  rl_resolution_row row{};
  row.arch = static_cast<int>(r.params.arch);
  row.m = r.params.m;
  row.big_m = r.params.big_m;
  row.q_factor = r.params.q_factor;
  row.oversampling = r.params.oversampling;
  row.ok = r.bounds ? 1 : 0;
  if (r.bounds) {
    const auto& b = *r.bounds;
    row.bounds = {b.n_lock, b.t_target, b.omega_low, b.omega_high, b.width, b.relative_width,
                  b.phi0_at_low};
  }
  row.status = r.status.c_str();
  *out = row;
  return RL_OK;
}

rl_status rl_table_write(const rl_table* table, const char* path, rl_format format) {
  if (!table || !path) return null_argument("table and path");
  return guarded([&] {
    relaylock::write_to_path(path, [&](std::ostream& os) {
      relaylock::write_resolution(os, table->table, to_format(format));
    });
  });
}

rl_status rl_compare_run(const rl_config* config, rl_comparison** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    *out = new rl_comparison{
        relaylock::compare_architectures(cfg.arch, cfg.m_values, cfg.resolved_big_m_values())};
  });
}

void rl_comparison_destroy(rl_comparison* comparison) { delete comparison; }

size_t rl_comparison_size(const rl_comparison* comparison) {
  return comparison ? comparison->report.entries.size() : 0;
}

rl_status rl_comparison_entry_at(const rl_comparison* comparison, size_t i,
                                 rl_comparison_entry* out) {
  if (!comparison || !out) return null_argument("comparison and out");
  if (i >= comparison->report.entries.size()) {
    g_last_error = "entry index out of range";
    return RL_ERROR_INVALID_ARGUMENT;
  }
  const auto& e = comparison->report.entries[i];
  *out = rl_comparison_entry{e.m, e.big_m, e.differentiator_width.value_or(std::nan("")),
                             e.pdo_width.value_or(std::nan("")),
                             relaylock::to_string(e.verdict).data()};
  return RL_OK;
}

rl_status rl_comparison_write(const rl_comparison* comparison, const char* path,
                              rl_format format) {
  if (!comparison || !path) return null_argument("comparison and path");
  return guarded([&] {
    relaylock::write_to_path(path, [&](std::ostream& os) {
      relaylock::write_comparison(os, comparison->report, to_format(format));
    });
  });
}

rl_status rl_validate_run(const rl_config* config, rl_report** out) {
  if (!config || !out) return null_argument("config and out");
  return guarded([&] {
    const auto& cfg = checked(config);
    relaylock::ValidationSettings settings;
    settings.tsypkin_tolerance = cfg.tolerance;
    settings.harmonics = cfg.harmonics;
    settings.sim = cfg.sim_settings();
    *out = new rl_report{relaylock::run_validation(cfg.arch, settings)};
  });
}

void rl_report_destroy(rl_report* report) { delete report; }

size_t rl_report_size(const rl_report* report) { return report ? report->report.checks.size() : 0; }

rl_status rl_report_check(const rl_report* report, size_t i, rl_check* out) {
  if (!report || !out) return null_argument("report and out");
  if (i >= report->report.checks.size()) {
    g_last_error = "check index out of range";
    return RL_ERROR_INVALID_ARGUMENT;
  }
  const auto& c = report->report.checks[i];
  *out = rl_check{c.name.c_str(), c.passed ? 1 : 0, c.detail.c_str()};
  return RL_OK;
}

int rl_report_passed(const rl_report* report) {
  return report && report->report.passed() ? 1 : 0;
}

rl_status rl_report_write(const rl_report* report, const char* path, rl_format format) {
  if (!report || !path) return null_argument("report and path");
  return guarded([&] {
    relaylock::write_to_path(path, [&](std::ostream& os) {
      relaylock::write_validation(os, report->report, to_format(format));
    });
  });
}

}  // extern "C"
