#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace relaylock {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(std::string_view key, int line) {
  std::string s = "field '" + std::string(key) + "'";
  if (line > 0) s += " (line " + std::to_string(line) + ")";
  return s;
}

[[noreturn]] void bad_value(std::string_view key, int line, std::string_view value,
                            std::string_view expected) {
  throw Error(ErrorCode::Config, "config error: " + where(key, line) + ": expected " +
                                     std::string(expected) + ", got '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, line, v, "a number");
  return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v, int line) {
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, line, v, "an integer");
  return out;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view v, int line) {
  std::vector<int> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_int<int>(key, trim(v.substr(0, comma)), line));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) bad_value(key, line, v, "a comma-separated integer list");
  return out;
}

// "delay:coeff,delay:coeff"
std::vector<FilterTap> parse_taps(std::string_view key, std::string_view v, int line) {
  std::vector<FilterTap> taps;
  std::string_view rest = v;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) bad_value(key, line, v, "taps as delay:coeff pairs");
    taps.push_back({parse_int<int>(key, trim(item.substr(0, colon)), line),
                    parse_double(key, trim(item.substr(colon + 1)), line)});
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return taps;
}

std::string canonical_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  if (k == "M") return "big_m";
  if (k == "M_values") return "big_m_values";
  if (k == "architecture") return "arch";
  if (k == "q_factor") return "q";
  return k;
}

}  // namespace

std::vector<std::string> RunConfig::known_keys() {
  return {"arch",     "f0",        "q",           "oversampling", "m",
          "big_m",    "feedback_sign", "taps",    "plant_gain",   "init_w",
          "init_v",   "points",    "range_pct",   "omega_lo",     "omega_hi",
          "omega0_scale", "policy", "out",        "format",       "skip",
          "window",   "m_values",  "big_m_values", "n_lock",      "tolerance",
          "harmonics"};
}

void RunConfig::set(std::string_view raw_key, std::string_view raw_value, int line) {
  const std::string key = canonical_key(trim(raw_key));
  const std::string_view v = trim(raw_value);

  if (key == "arch") {
    const auto a = parse_architecture(v);
    if (!a) bad_value(key, line, v, "differentiator | pdo | custom-taps");
    arch.arch = *a;
  } else if (key == "f0") {
    arch.f0 = parse_double(key, v, line);
  } else if (key == "q") {
    arch.q_factor = parse_double(key, v, line);
  } else if (key == "oversampling") {
    arch.oversampling = parse_double(key, v, line);
  } else if (key == "m") {
    arch.m = parse_int<int>(key, v, line);
  } else if (key == "big_m") {
    arch.big_m = parse_int<int>(key, v, line);
  } else if (key == "feedback_sign") {
    if (v == "auto") arch.feedback_sign.reset();
    else arch.feedback_sign = parse_int<int>(key, v, line);
  } else if (key == "taps") {
    arch.custom_taps = parse_taps(key, v, line);
  } else if (key == "plant_gain") {
    arch.plant_gain = parse_double(key, v, line);
  } else if (key == "init_w") {
    initial_state.w = parse_double(key, v, line);
  } else if (key == "init_v") {
    initial_state.v = parse_double(key, v, line);
  } else if (key == "points") {
    points = parse_int<int>(key, v, line);
  } else if (key == "range_pct") {
    range_pct = parse_double(key, v, line);
  } else if (key == "omega_lo") {
    omega_lo = parse_double(key, v, line);
  } else if (key == "omega_hi") {
    omega_hi = parse_double(key, v, line);
  } else if (key == "omega0_scale") {
    omega0_scale = parse_double(key, v, line);
  } else if (key == "policy") {
    const auto p = parse_policy(v);
    if (!p) bad_value(key, line, v, "fixed | continuation");
    policy = *p;
  } else if (key == "out") {
    out = std::string(v);
  } else if (key == "format") {
    if (v == "csv") format = OutputFormat::Csv;
    else if (v == "json") format = OutputFormat::Json;
    else bad_value(key, line, v, "csv | json");
  } else if (key == "skip") {
    transient_skip = parse_int<std::int64_t>(key, v, line);
  } else if (key == "window") {
    window = parse_int<std::int64_t>(key, v, line);
  } else if (key == "m_values") {
    m_values = parse_int_list(key, v, line);
  } else if (key == "big_m_values") {
    big_m_values = parse_int_list(key, v, line);
  } else if (key == "n_lock") {
    n_lock = parse_int<int>(key, v, line);
  } else if (key == "tolerance") {
    tolerance = parse_double(key, v, line);
  } else if (key == "harmonics") {
    harmonics = parse_int<int>(key, v, line);
  } else {
    throw Error(ErrorCode::Config, "config error: unknown " + where(key, line));
  }
  origin_[key] = line;
}

void RunConfig::load_text(std::string_view text) {
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config,
                  "config error: line " + std::to_string(line_no) + ": expected key=value");
    }
    set(s.substr(0, eq), s.substr(eq + 1), line_no);
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "config error: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str());
}

void RunConfig::fail(std::string_view field, const std::string& message) const {
  const auto it = origin_.find(field);
  const int line = it == origin_.end() ? 0 : it->second;
  throw Error(ErrorCode::Config, "config error: " + where(field, line) + ": " + message);
}

void RunConfig::validate() const {
  auto positive = [&](std::string_view f, double x) {
    if (!(std::isfinite(x) && x > 0.0)) fail(f, "must be a finite number > 0");
  };
  positive("f0", arch.f0);
  positive("q", arch.q_factor);
  if (!(arch.q_factor > 0.5)) fail("q", "must exceed 0.5 (underdamped resonator)");
  positive("oversampling", arch.oversampling);
  if (!(arch.oversampling > 2.0)) fail("oversampling", "must exceed 2 (Fs > 2 F0)");
  if (arch.arch != Architecture::Custom && arch.m < 1) fail("m", "must be >= 1");
  if (arch.big_m < 1) fail("big_m", "must be >= 1");
  for (int x : m_values) {
    if (x < 1) fail("m_values", "entries must be >= 1");
  }
  for (int x : big_m_values) {
    if (x < 1) fail("big_m_values", "entries must be >= 1");
  }
  if (arch.feedback_sign && *arch.feedback_sign != 1 && *arch.feedback_sign != -1) {
    fail("feedback_sign", "must be +1, -1 or auto");
  }
  if (arch.arch == Architecture::Custom) {
    try {
      (void)FeedbackFilter(arch.custom_taps);
    } catch (const Error& e) {
      fail("taps", e.what());
    }
  }
  if (!std::isfinite(arch.plant_gain) || arch.plant_gain == 0.0) {
    fail("plant_gain", "must be finite and nonzero");
  }
  if (!std::isfinite(initial_state.w)) fail("init_w", "must be finite");
  if (!std::isfinite(initial_state.v)) fail("init_v", "must be finite");
  if (points < 2) fail("points", "must be >= 2");
  positive("range_pct", range_pct);
  if (!(range_pct < 100.0)) fail("range_pct", "must be < 100");
  if (omega_lo.has_value() != omega_hi.has_value()) {
    fail(omega_lo ? "omega_hi" : "omega_lo", "omega_lo and omega_hi must be given together");
  }
  if (omega_lo) {
    positive("omega_lo", *omega_lo);
    positive("omega_hi", *omega_hi);
    if (*omega_lo == *omega_hi) fail("omega_hi", "must differ from omega_lo");
  }
  positive("omega0_scale", omega0_scale);
  if (transient_skip && *transient_skip < 0) fail("skip", "must be >= 0");
  if (window < 8) fail("window", "must be >= 8");
  if (n_lock && *n_lock < 1) fail("n_lock", "must be >= 1");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) fail("tolerance", "must be >= 0");
  if (harmonics < 1) fail("harmonics", "must be >= 1");
  if (out.empty()) fail("out", "must not be empty");
}

SimSettings RunConfig::sim_settings() const {
  SimSettings s;
  s.transient_skip = transient_skip;
  s.window = window;
  s.initial_state = initial_state;
  return s;
}

double RunConfig::simulate_omega0() const { return arch.nominal_omega0() * omega0_scale; }

std::pair<double, double> RunConfig::sweep_range() const {
  if (omega_lo) return {*omega_lo, *omega_hi};
  const double w = arch.nominal_omega0();
  return {w * (1.0 - range_pct / 100.0), w * (1.0 + range_pct / 100.0)};
}

LoopConfig RunConfig::loop_config() const {
  return sim_settings().loop_config(arch, simulate_omega0());
}

std::vector<int> RunConfig::resolved_big_m_values() const {
  return big_m_values.empty() ? std::vector<int>{arch.big_m} : big_m_values;
}

}  // namespace relaylock
