// relaylock command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaylock/relaylock.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

int exit_code(rl_status s) {
  switch (s) {
    case RL_OK: return 0;
    case RL_ERROR_CONFIG:
    case RL_ERROR_NO_OSCILLATION:
    case RL_ERROR_VALIDATION: return static_cast<int>(s);
    default: return kExitError;
  }
}

int report(rl_status s, const char* context) {
  std::fprintf(stderr, "relaylock %s: %s: %s\n", context, rl_status_string(s), rl_last_error());
  return exit_code(s);
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
template <class T, void (*Destroy)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Destroy>>;

using ConfigHandle = Handle<rl_config, rl_config_destroy>;

int cmd_simulate(const rl_config* cfg) {
  rl_trace* raw = nullptr;
  if (auto s = rl_simulate(cfg, &raw); s != RL_OK) return report(s, "simulate");
  Handle<rl_trace, rl_trace_destroy> trace(raw);

  const std::string out = rl_config_output(cfg);
  if (auto s = rl_trace_write(trace.get(), out.c_str(), rl_config_format(cfg)); s != RL_OK) {
    return report(s, "simulate");
  }
  FILE* summary = out == "-" ? stderr : stdout;
  rl_period_measurement m{};
  if (auto s = rl_trace_measure(trace.get(), -1, 0, &m); s != RL_OK) return report(s, "simulate");

  const double ts = rl_trace_ts(trace.get());
  std::fprintf(summary, "samples      %zu\n", rl_trace_length(trace.get()));
  std::fprintf(summary, "mean period  %.17g s (%.17g Ts)\n", m.mean_period, m.mean_period / ts);
  if (m.locked) {
    std::fprintf(summary, "lock ratio   T/Ts = %lld/%lld (pattern period %lld samples)\n",
                 static_cast<long long>(m.ratio_num), static_cast<long long>(m.ratio_den),
                 static_cast<long long>(m.period_samples));
  } else {
    std::fprintf(summary, "lock ratio   unlocked\n");
  }
  std::fprintf(summary, "jitter       %.17g s\n", m.jitter);
  return 0;
}

int cmd_staircase(const rl_config* cfg) {
  rl_staircase* raw = nullptr;
  if (auto s = rl_staircase_run(cfg, &raw); s != RL_OK) return report(s, "staircase");
  Handle<rl_staircase, rl_staircase_destroy> ds(raw);
  if (auto s = rl_staircase_write(ds.get(), rl_config_output(cfg), rl_config_format(cfg));
      s != RL_OK) {
    return report(s, "staircase");
  }
  return 0;
}

int cmd_resolution(const rl_config* cfg) {
  rl_table* raw = nullptr;
  if (auto s = rl_resolution_run(cfg, &raw); s != RL_OK) return report(s, "resolution");
  Handle<rl_table, rl_table_destroy> table(raw);
  if (auto s = rl_table_write(table.get(), rl_config_output(cfg), rl_config_format(cfg));
      s != RL_OK) {
    return report(s, "resolution");
  }
  return 0;
}

int cmd_compare(const rl_config* cfg) {
  rl_comparison* raw = nullptr;
  if (auto s = rl_compare_run(cfg, &raw); s != RL_OK) return report(s, "compare");
  Handle<rl_comparison, rl_comparison_destroy> cmp(raw);
  if (auto s = rl_comparison_write(cmp.get(), rl_config_output(cfg), rl_config_format(cfg));
      s != RL_OK) {
    return report(s, "compare");
  }
  int pdo = 0;
  const size_t n = rl_comparison_size(cmp.get());
  for (size_t i = 0; i < n; ++i) {
    rl_comparison_entry e{};
    rl_comparison_entry_at(cmp.get(), i, &e);
    if (std::string(e.verdict) == "pdo") ++pdo;
  }
  std::fprintf(stderr, "pdo has the narrower step in %d of %zu configurations\n", pdo, n);
  return 0;
}

int cmd_validate(const rl_config* cfg) {
  rl_report* raw = nullptr;
  if (auto s = rl_validate_run(cfg, &raw); s != RL_OK) return report(s, "validate");
  Handle<rl_report, rl_report_destroy> rep(raw);
  if (auto s = rl_report_write(rep.get(), rl_config_output(cfg), rl_config_format(cfg));
      s != RL_OK) {
    return report(s, "validate");
  }
  const bool ok = rl_report_passed(rep.get()) != 0;
  for (size_t i = 0; i < rl_report_size(rep.get()); ++i) {
    rl_check c{};
    rl_report_check(rep.get(), i, &c);
    std::fprintf(stderr, "[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
  }
  return ok ? 0 : static_cast<int>(RL_ERROR_VALIDATION);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-feedback resonator oscillator simulation and resolution analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  // flag name -> config key; values are forwarded verbatim so the library does
  // all parsing and validation.
  const std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--arch", "arch"},       {"--f0", "f0"},
      {"--q", "q"},             {"--oversampling", "oversampling"},
      {"--m", "m"},             {"--big-m", "big_m"},
      {"--points", "points"},   {"--range-pct", "range_pct"},
      {"--policy", "policy"},   {"--out", "out"},
      {"--format", "format"},   {"--feedback-sign", "feedback_sign"},
      {"--m-values", "m_values"}, {"--big-m-values", "big_m_values"},
      {"--tolerance", "tolerance"}, {"--omega0-scale", "omega0_scale"},
  };
  std::map<std::string, std::string> flag_values;

  app.add_option("--config", config_path, "key=value configuration file");
  for (const auto& [flag, key] : flag_keys) {
    app.add_option(flag, flag_values[key], "sets config key '" + key + "'");
  }
  app.add_option("--set", overrides, "additional key=value assignment (repeatable)");

  auto* simulate = app.add_subcommand("simulate", "simulate the loop, write its trace");
  auto* staircase = app.add_subcommand("staircase", "sweep omega0, write the sensor response");
  auto* resolution = app.add_subcommand("resolution", "step bounds per (m, M)");
  auto* compare = app.add_subcommand("compare", "differentiator vs PDO step widths");
  auto* validate = app.add_subcommand("validate", "simulation / solver / series cross-check");
  for (auto* sub : {simulate, staircase, resolution, compare, validate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  rl_config* raw = nullptr;
  if (auto s = rl_config_create(&raw); s != RL_OK) return report(s, "config");
  ConfigHandle cfg(raw);

  if (!config_path.empty()) {
    if (auto s = rl_config_load_file(cfg.get(), config_path.c_str()); s != RL_OK) {
      return report(s, "config");
    }
  }
  for (const auto& [flag, key] : flag_keys) {
    const auto* opt = app.get_option(flag);
    if (opt->count() == 0) continue;
    if (auto s = rl_config_set(cfg.get(), key.c_str(), flag_values[key].c_str()); s != RL_OK) {
      return report(s, "config");
    }
  }
  for (const auto& assignment : overrides) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "relaylock config: --set expects key=value, got '%s'\n",
                   assignment.c_str());
      return kExitConfig;
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    if (auto s = rl_config_set(cfg.get(), key.c_str(), value.c_str()); s != RL_OK) {
      return report(s, "config");
    }
  }
  if (auto s = rl_config_validate(cfg.get()); s != RL_OK) return report(s, "config");

  if (*simulate) return cmd_simulate(cfg.get());
  if (*staircase) return cmd_staircase(cfg.get());
  if (*resolution) return cmd_resolution(cfg.get());
  if (*compare) return cmd_compare(cfg.get());
  return cmd_validate(cfg.get());
}
