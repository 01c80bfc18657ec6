#include "emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>

#include <json.hpp>

#include "error.hpp"

namespace relaylock {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_to_path(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void dump(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

json arch_json(const ArchParams& p) {
  return {{"arch", to_string(p.arch)}, {"m", p.m},   {"M", p.big_m},
          {"Q", p.q_factor},           {"f0", p.f0}, {"oversampling", p.oversampling},
          {"feedback_sign", p.loop_sign()}};
}

}  // namespace

void write_trace(std::ostream& os, const SimTrace& trace, OutputFormat format) {
  if (format == OutputFormat::Json) {
    json rows = json::array();
    for (std::size_t n = 0; n < trace.signs.size(); ++n) {
      rows.push_back({{"n", n}, {"t_s", number(n * trace.ts)}, {"w", number(trace.sampled_w[n])},
                      {"sign", trace.signs[n]}, {"u", number(trace.u[n])}});
    }
    dump(os, {{"ts", trace.ts}, {"rows", rows}});
    return;
  }
  os << "n,t_s,w,sign,u\n";
  for (std::size_t n = 0; n < trace.signs.size(); ++n) {
    os << n << ',' << format_number(static_cast<double>(n) * trace.ts) << ','
       << format_number(trace.sampled_w[n]) << ',' << static_cast<int>(trace.signs[n]) << ','
       << format_number(trace.u[n]) << '\n';
  }
}

void write_staircase(std::ostream& os, const StaircaseDataset& ds, OutputFormat format) {
  if (format == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& r : ds.rows) {
      rows.push_back({{"omega0", r.omega0},
                      {"omega0_sq", r.omega0 * r.omega0},
                      {"period_s", number(r.mean_period)},
                      {"ratio_num", r.ratio_num()},
                      {"ratio_den", r.ratio_den()},
                      {"locked", r.locked}});
    }
    json meta = arch_json(ds.params);
    meta["fs"] = ds.params.fs();
    meta["policy"] = to_string(ds.policy);
    meta["initial_state"] = {ds.settings.initial_state.w, ds.settings.initial_state.v};
    meta["window"] = ds.settings.window;
    dump(os, {{"metadata", meta}, {"rows", rows}});
    return;
  }
  os << "omega0,omega0_sq,period_s,ratio_num,ratio_den,locked\n";
  for (const auto& r : ds.rows) {
    os << format_number(r.omega0) << ',' << format_number(r.omega0 * r.omega0) << ','
       << format_number(r.mean_period) << ',' << r.ratio_num() << ',' << r.ratio_den() << ','
       << (r.locked ? 1 : 0) << '\n';
  }
}

void write_resolution(std::ostream& os, const ResolutionTable& table, OutputFormat format) {
  if (format == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& r : table) {
      json j = arch_json(r.params);
      j["N"] = r.n_lock;
      j["status"] = r.status;
      if (r.bounds) {
        j["omega_low"] = r.bounds->omega_low;
        j["omega_high"] = r.bounds->omega_high;
        j["width"] = r.bounds->width;
        j["relative_width"] = r.bounds->relative_width;
      }
      rows.push_back(j);
    }
    dump(os, {{"rows", rows}});
    return;
  }
  os << "arch,m,M,Q,oversampling,N,omega_low,omega_high,width,relative_width,status\n";
  for (const auto& r : table) {
    const double nan = std::nan("");
    const StepBounds b = r.bounds.value_or(StepBounds{0, 0, nan, nan, nan, nan, 0});
    os << to_string(r.params.arch) << ',' << r.params.m << ',' << r.params.big_m << ','
       << format_number(r.params.q_factor) << ',' << format_number(r.params.oversampling) << ','
       << r.n_lock << ',' << format_number(b.omega_low) << ',' << format_number(b.omega_high)
       << ',' << format_number(b.width) << ',' << format_number(b.relative_width) << ','
       << csv_field(r.status) << '\n';
  }
}

void write_comparison(std::ostream& os, const ComparisonReport& report, OutputFormat format) {
  const ArchParams* base = report.pdo.empty() ? nullptr : &report.pdo.front().params;
  const double q = base ? base->q_factor : std::nan("");
  const double os_ratio = base ? base->oversampling : std::nan("");
  const int n = base ? base->dominant_lock() : 0;
  auto width = [](const std::optional<double>& w) { return w ? *w : std::nan(""); };

  if (format == OutputFormat::Json) {
    json rows = json::array();
    for (const auto& e : report.entries) {
      rows.push_back({{"m", e.m},
                      {"M", e.big_m},
                      {"differentiator_relative_width", number(width(e.differentiator_width))},
                      {"pdo_relative_width", number(width(e.pdo_width))},
                      {"verdict", to_string(e.verdict)}});
    }
    dump(os, {{"Q", q},
              {"oversampling", os_ratio},
              {"N", n},
              {"pdo_better", report.count(Verdict::PdoBetter)},
              {"differentiator_better", report.count(Verdict::DifferentiatorBetter)},
              {"rows", rows}});
    return;
  }
  os << "m,M,Q,oversampling,N,differentiator_relative_width,pdo_relative_width,verdict\n";
  for (const auto& e : report.entries) {
    os << e.m << ',' << e.big_m << ',' << format_number(q) << ',' << format_number(os_ratio)
       << ',' << n << ',' << format_number(width(e.differentiator_width)) << ','
       << format_number(width(e.pdo_width)) << ',' << to_string(e.verdict) << '\n';
  }
}

void write_validation(std::ostream& os, const ValidationReport& report, OutputFormat format) {
  if (format == OutputFormat::Json) {
    json checks = json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    dump(os, {{"passed", report.passed()}, {"checks", checks}});
    return;
  }
  os << "check,passed,detail\n";
  for (const auto& c : report.checks) {
    os << c.name << ',' << (c.passed ? 1 : 0) << ',' << csv_field(c.detail) << '\n';
  }
}

}  // namespace relaylock
