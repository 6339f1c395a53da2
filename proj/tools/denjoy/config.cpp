#include "denjoy/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace denjoy::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& v, int line, const std::string& field) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(line, field, "expected a finite number, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int to_int(const std::string& v, int line, const std::string& field) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, field, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v, int line, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(line, field, "expected true or false, got '" + v + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.seed", [](auto& c, auto& v, int l, auto& f) { c.seed = to_int<std::uint64_t>(v, l, f); }},
      {"run.experiment_id", [](auto& c, auto& v, int, auto&) { c.experiment_id = v; }},
      {"run.output_dir", [](auto& c, auto& v, int, auto&) { c.output_dir = v; }},
      {"run.plots", [](auto& c, auto& v, int l, auto& f) { c.plots = to_bool(v, l, f); }},
      {"torus.k", [](auto& c, auto& v, int l, auto& f) { c.k = to_int<int>(v, l, f); }},
      {"torus.theta",
       [](auto& c, auto& v, int l, auto& f) {
         c.theta.clear();
         for (const auto& item : split_list(v)) c.theta.push_back(to_double(item, l, f));
       }},
      {"schedule.c_r", [](auto& c, auto& v, int l, auto& f) { c.c_r = to_double(v, l, f); }},
      {"schedule.p", [](auto& c, auto& v, int l, auto& f) { c.p = to_double(v, l, f); }},
      {"schedule.J", [](auto& c, auto& v, int l, auto& f) { c.window = to_int<int>(v, l, f); }},
      {"schedule.V_max", [](auto& c, auto& v, int l, auto& f) { c.v_max = to_double(v, l, f); }},
      {"distortion.m", [](auto& c, auto& v, int l, auto& f) { c.order = to_int<int>(v, l, f); }},
      {"distortion.eps0", [](auto& c, auto& v, int l, auto& f) { c.eps0 = to_double(v, l, f); }},
      {"distortion.direction", [](auto& c, auto& v, int, auto&) { c.direction = v; }},
      {"distortion.delta", [](auto& c, auto& v, int l, auto& f) { c.delta = to_double(v, l, f); }},
      {"distortion.steps", [](auto& c, auto& v, int l, auto& f) { c.steps = to_int<int>(v, l, f); }},
      {"distortion.fit_samples",
       [](auto& c, auto& v, int l, auto& f) { c.fit_samples = to_int<int>(v, l, f); }},
      {"trap.lambda", [](auto& c, auto& v, int l, auto& f) { c.lambda = to_double(v, l, f); }},
      {"trap.horizon", [](auto& c, auto& v, int l, auto& f) { c.horizon = to_int<int>(v, l, f); }},
      {"trap.samples",
       [](auto& c, auto& v, int l, auto& f) { c.boundary_samples = to_int<int>(v, l, f); }},
      {"trap.margin", [](auto& c, auto& v, int l, auto& f) { c.margin = to_double(v, l, f); }},
      {"trap.minimality_horizon",
       [](auto& c, auto& v, int l, auto& f) { c.minimality_horizon = to_int<int>(v, l, f); }},
      {"denjoy.alpha", [](auto& c, auto& v, int l, auto& f) { c.alpha = to_double(v, l, f); }},
      {"denjoy.c", [](auto& c, auto& v, int l, auto& f) { c.c = to_double(v, l, f); }},
      {"denjoy.truncation",
       [](auto& c, auto& v, int l, auto& f) { c.truncation = to_int<long long>(v, l, f); }},
      {"denjoy.tail_tolerance",
       [](auto& c, auto& v, int l, auto& f) { c.tail_tolerance = to_double(v, l, f); }},
      {"denjoy.orbit_length",
       [](auto& c, auto& v, int l, auto& f) { c.orbit_length = to_int<long long>(v, l, f); }},
      {"conf.trials", [](auto& c, auto& v, int l, auto& f) { c.trials = to_int<int>(v, l, f); }},
      {"conf.dims",
       [](auto& c, auto& v, int l, auto& f) {
         c.dims.clear();
         for (const auto& item : split_list(v)) c.dims.push_back(to_int<int>(item, l, f));
       }},
      {"conf.bridge_trials",
       [](auto& c, auto& v, int l, auto& f) { c.bridge_trials = to_int<int>(v, l, f); }},
  };
  return table;
}

void require(const ExperimentConfig& c, bool ok, const char* field, const std::string& message) {
  if (ok) return;
  const auto it = c.source_lines.find(field);
  throw ConfigError(it == c.source_lines.end() ? 0 : it->second, field, message);
}

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::ConfCheck: return "conf-check";
    case Experiment::Denjoy: return "denjoy";
    case Experiment::Blowup: return "blowup";
    case Experiment::Distort: return "distort";
    case Experiment::Trap: return "trap";
    case Experiment::DemoTheorem: return "demo-theorem";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  if (name == "conf" || name == "conf-check") return Experiment::ConfCheck;
  if (name == "denjoy") return Experiment::Denjoy;
  if (name == "blowup") return Experiment::Blowup;
  if (name == "distort") return Experiment::Distort;
  if (name == "trap") return Experiment::Trap;
  if (name == "demo-theorem") return Experiment::DemoTheorem;
  throw ConfigError(0, "kind", "unknown experiment '" + std::string(name) + "'");
}

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + message),
      line_(line),
      field_(std::move(field)),
      message_(message) {}

std::vector<double> ExperimentConfig::translation() const {
  if (!theta.empty()) return theta;
  static constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<double> t;
  for (int i = 0; i < k; ++i) {
    const double s = std::sqrt(kPrimes[i]);
    t.push_back(s - std::floor(s));
  }
  return t;
}

void ExperimentConfig::validate() const {
  require(*this, !experiment_id.empty() && experiment_id.find_first_of("/\\") == std::string::npos,
          "run.experiment_id", "experiment id must be a non-empty file name");
  require(*this, k >= 2 && k <= 8, "torus.k", "k must lie in [2, 8]");
  if (!theta.empty()) {
    require(*this, static_cast<int>(theta.size()) == k, "torus.theta", "theta needs exactly k components");
    for (double t : theta) require(*this, t >= 0.0 && t < 1.0, "torus.theta", "theta components must lie in [0, 1)");
  }
  require(*this, c_r > 0.0 && c_r < 0.5, "schedule.c_r", "c_r must lie in (0, 0.5)");
  require(*this, p >= 0.0 && p <= 10.0, "schedule.p", "p must lie in [0, 10]");
  require(*this, window >= 0 && window <= 20000, "schedule.J", "J must lie in [0, 20000]");
  require(*this, v_max > 0.0, "schedule.V_max", "V_max must be positive");
  require(*this, order >= 0 && order <= 16, "distortion.m", "m must lie in [1, 16] (0 selects k)");
  require(*this, eps0 >= 0.0, "distortion.eps0", "eps0 must be non-negative");
  require(*this, direction == "diag" || direction == "shear", "distortion.direction",
          "direction must be 'diag' or 'shear'");
  require(*this, delta >= 0.0, "distortion.delta", "delta must be non-negative");
  const bool traces = kind == Experiment::Distort || kind == Experiment::DemoTheorem;
  const bool traps = kind == Experiment::Trap || kind == Experiment::DemoTheorem;
  require(*this, steps >= 1 && (!traces || steps <= window), "distortion.steps", "steps must lie in [1, J]");
  require(*this, fit_samples >= 100, "distortion.fit_samples", "fit_samples must be at least 100");
  require(*this, lambda > 1.0, "trap.lambda", "lambda must exceed 1");
  require(*this, horizon >= 1 && (!traps || horizon <= window), "trap.horizon", "horizon must lie in [1, J]");
  require(*this, boundary_samples >= 1, "trap.samples", "samples must be positive");
  require(*this, margin >= 0.0, "trap.margin", "margin must be non-negative");
  require(*this, minimality_horizon >= 1, "trap.minimality_horizon", "minimality_horizon must be positive");
  require(*this, alpha > 0.0 && alpha < 1.0, "denjoy.alpha", "alpha must lie in (0, 1)");
  require(*this, c > 0.0, "denjoy.c", "c must be positive");
  require(*this, truncation >= 1 && truncation <= 5000000, "denjoy.truncation",
          "truncation must lie in [1, 5e6]");
  require(*this, tail_tolerance > 0.0, "denjoy.tail_tolerance", "tail_tolerance must be positive");
  require(*this, orbit_length >= 1000 && orbit_length <= 10000000, "denjoy.orbit_length",
          "orbit_length must lie in [1000, 1e7]");
  require(*this, trials >= 1, "conf.trials", "trials must be positive");
  require(*this, bridge_trials >= 1, "conf.bridge_trials", "bridge_trials must be positive");
  require(*this, !dims.empty(), "conf.dims", "dims must be non-empty");
  for (int d : dims) require(*this, d >= 1 && d <= 8, "conf.dims", "dims must lie in [1, 8]");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "kind=" << to_string(kind) << "\nseed=" << seed << "\nexperiment_id=" << experiment_id
     << "\nk=" << k << "\ntheta=";
  for (double t : translation()) os << t << ",";
  os << "\nc_r=" << c_r << "\np=" << p << "\nJ=" << window << "\nV_max=" << v_max
     << "\nm=" << flatness_order() << "\neps0=" << eps0 << "\ndirection=" << direction
     << "\ndelta=" << delta << "\nsteps=" << steps << "\nfit_samples=" << fit_samples
     << "\nlambda=" << lambda << "\nhorizon=" << horizon << "\nsamples=" << boundary_samples
     << "\nmargin=" << margin << "\nminimality_horizon=" << minimality_horizon
     << "\nalpha=" << alpha << "\nc=" << c << "\ntruncation=" << truncation
     << "\ntail_tolerance=" << tail_tolerance << "\norbit_length=" << orbit_length
     << "\ntrials=" << trials << "\nbridge_trials=" << bridge_trials << "\ndims=";
  for (int d : dims) os << d << ",";
  os << "\n";
  return os.str();
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  static const std::set<std::string> sections = {"run", "torus", "schedule", "distortion",
                                                 "trap", "denjoy", "conf"};
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "", "malformed section header '" + s + "'");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      if (!sections.count(section)) throw ConfigError(line, section, "unknown section");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value', got '" + s + "'");
    if (section.empty()) throw ConfigError(line, "", "key outside of any section");
    const std::string field = section + "." + trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    const auto it = setters().find(field);
    if (it == setters().end()) throw ConfigError(line, field, "unknown key");
    if (!seen.insert(field).second) throw ConfigError(line, field, "duplicate key");
    if (value.empty()) throw ConfigError(line, field, "empty value");
    it->second(base, value, line, field);
    base.source_lines[field] = line;
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "--config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace denjoy::cli
