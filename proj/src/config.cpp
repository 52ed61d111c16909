#include "starkloop/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "starkloop/errors.hpp"
#include "starkloop/util.hpp"

namespace starkloop {

namespace {

constexpr const char* kExperimentNames[] = {
    "phase-law", "response-map", "theta-sweep", "rmse-uniform",
    "rmse-nonuniform", "gain-curve", "validate",
};

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  return v;
}

std::vector<double> parse_array(const std::string& key, const std::string& value) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']')
    throw ConfigError("key '" + key + "': expected an array like [1, 2, 3]");
  std::vector<double> out;
  std::string body = value.substr(1, value.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("key '" + key + "': empty array element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': array must not be empty");
  return out;
}

std::string render_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format17(values[i]);
  }
  return out + "]";
}

struct FieldDef {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  // Returns the serialized value, or nullopt to omit the key.
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

FieldDef field(const char* key, double ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
          [member](const ExperimentConfig& c) { return format17(c.*member); }};
}

FieldDef field(const char* key, int ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = static_cast<int>(parse_int(key, v));
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

FieldDef field(const char* key, std::uint64_t ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_u64(key, v); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

FieldDef field(const char* key, std::string ExperimentConfig::* member) {
  return {key, [member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

FieldDef field(const char* key, std::optional<double> ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return format17(*(c.*member));
          }};
}

FieldDef field(const char* key, std::optional<int> ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) {
            c.*member = static_cast<int>(parse_int(key, v));
          },
          [member](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return std::to_string(*(c.*member));
          }};
}

FieldDef field(const char* key, std::optional<std::string> ExperimentConfig::* member) {
  return {key, [member](ExperimentConfig& c, const std::string& v) { c.*member = v; },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

FieldDef field(const char* key, std::vector<double> ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_array(key, v); },
          [member](const ExperimentConfig& c) { return render_array(c.*member); }};
}

FieldDef field(const char* key, std::optional<std::vector<double>> ExperimentConfig::* member) {
  return {key,
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = parse_array(key, v); },
          [member](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return render_array(*(c.*member));
          }};
}

const std::vector<FieldDef>& registry() {
  static const std::vector<FieldDef> defs = [] {
    std::vector<FieldDef> f;
    f.push_back({"experiment",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.experiment = experiment_from_name(v);
                 },
                 [](const ExperimentConfig& c) -> std::optional<std::string> {
                   if (!c.experiment) return std::nullopt;
                   return std::string(experiment_name(*c.experiment));
                 }});
    f.push_back(field("omega_p", &ExperimentConfig::omega_p));
    f.push_back(field("omega_c", &ExperimentConfig::omega_c));
    f.push_back(field("omega_s_rabi", &ExperimentConfig::omega_s_rabi));
    f.push_back(field("delta_p", &ExperimentConfig::delta_p));
    f.push_back(field("delta_c", &ExperimentConfig::delta_c));
    f.push_back(field("delta_s", &ExperimentConfig::delta_s));
    f.push_back(field("omega_s_drive", &ExperimentConfig::omega_s_drive));
    f.push_back(field("theta", &ExperimentConfig::theta));
    f.push_back(field("gamma21", &ExperimentConfig::gamma21));
    f.push_back(field("gamma32", &ExperimentConfig::gamma32));
    f.push_back(field("gamma42", &ExperimentConfig::gamma42));
    f.push_back(field("deph3", &ExperimentConfig::deph3));
    f.push_back(field("deph4", &ExperimentConfig::deph4));
    f.push_back(field("n_max", &ExperimentConfig::n_max));
    f.push_back(field("n_ref", &ExperimentConfig::n_ref));
    f.push_back(field("seed", &ExperimentConfig::seed));
    f.push_back(field("trials", &ExperimentConfig::trials));
    f.push_back(field("threads", &ExperimentConfig::threads));
    f.push_back(field("out_dir", &ExperimentConfig::out_dir));
    f.push_back(field("detuning", &ExperimentConfig::detuning));
    f.push_back(field("delta34", &ExperimentConfig::delta34));
    f.push_back(field("dipole_z", &ExperimentConfig::dipole_z));
    f.push_back(field("hbar", &ExperimentConfig::hbar));
    f.push_back(field("beta0", &ExperimentConfig::beta0));
    f.push_back(field("node_count", &ExperimentConfig::node_count));
    f.push_back(field("rel_spreads", &ExperimentConfig::rel_spreads));
    f.push_back(field("spread_min", &ExperimentConfig::spread_min));
    f.push_back(field("spread_max", &ExperimentConfig::spread_max));
    f.push_back(field("spread_points", &ExperimentConfig::spread_points));
    f.push_back(field("design_level", &ExperimentConfig::design_level));
    f.push_back(field("phi_points", &ExperimentConfig::phi_points));
    f.push_back(field("omega_s_min", &ExperimentConfig::omega_s_min));
    f.push_back(field("omega_s_max", &ExperimentConfig::omega_s_max));
    f.push_back(field("omega_s_points", &ExperimentConfig::omega_s_points));
    f.push_back(field("theta_min", &ExperimentConfig::theta_min));
    f.push_back(field("theta_max", &ExperimentConfig::theta_max));
    f.push_back(field("theta_points", &ExperimentConfig::theta_points));
    f.push_back(field("snr_grid", &ExperimentConfig::snr_grid));
    f.push_back(field("burn_in_periods", &ExperimentConfig::burn_in_periods));
    f.push_back(field("eval_periods", &ExperimentConfig::eval_periods));
    f.push_back(field("samples_per_period", &ExperimentConfig::samples_per_period));
    f.push_back(field("integrator_tol", &ExperimentConfig::integrator_tol));
    return f;
  }();
  return defs;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const char* experiment_name(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment experiment_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kExperimentNames[i]) return static_cast<Experiment>(i);
  throw ConfigError("unknown experiment '" + name + "'");
}

OperatingPoint ExperimentConfig::operating_point() const {
  OperatingPoint op;
  op.omega_p_rabi = omega_p;
  op.omega_c_rabi = omega_c;
  op.omega_s_rabi = omega_s_rabi;
  op.delta_p = delta_p;
  op.delta_c = delta_c;
  op.delta_s = delta_s;
  op.omega_s_drive = omega_s_drive;
  op.theta = theta;
  op.rates = {gamma21, gamma32, gamma42, deph3, deph4};
  return op;
}

StarkConfig ExperimentConfig::stark_config() const {
  StarkConfig cfg;
  cfg.delta34 = delta34;
  cfg.dipole_z = dipole_z;
  cfg.hbar = hbar;
  const double b0 = beta0.value_or(std::tan(2.0 * theta));
  cfg.bias = b0 * hbar * delta34 / (2.0 * dipole_z);
  return cfg;
}

void ExperimentConfig::finalize(Experiment e) {
  if (experiment && *experiment != e)
    throw ConfigError(std::string("experiment: config declares '") + experiment_name(*experiment) +
                      "' but '" + experiment_name(e) + "' was requested");
  experiment = e;

  if (!design_level) design_level = omega_s_rabi;
  if (!beta0) beta0 = std::tan(2.0 * theta);
  if (!theta_max) theta_max = kPi / 4.0 - 0.01;
  const bool rmse_like = e == Experiment::kRmseUniform || e == Experiment::kRmseNonuniform;
  if (!omega_s_min) omega_s_min = rmse_like ? 0.04 : 0.02;
  if (!omega_s_max) omega_s_max = rmse_like ? 0.24 : 0.30;
  if (!omega_s_points) omega_s_points = rmse_like ? 81 : 57;
  if (!snr_grid)
    snr_grid = e == Experiment::kRmseNonuniform ? logspace(1e2, 1e7, 8) : logspace(1e1, 1e4, 8);

  try {
    operating_point().validate();
  } catch (const DomainError& err) {
    throw ConfigError(std::string("operating point: ") + err.what());
  }
  check(n_max >= 1, "n_max: must be >= 1");
  check(n_ref > n_max, "n_ref: must exceed n_max");
  check(trials >= 1000, "trials: must be >= 1000");
  check(threads >= 0, "threads: must be >= 0");
  check(detuning == "fixed" || detuning == "local", "detuning: must be 'fixed' or 'local'");
  check(delta34 > 0.0, "delta34: must be > 0");
  check(dipole_z > 0.0, "dipole_z: must be > 0");
  check(hbar > 0.0, "hbar: must be > 0");
  // beta0 feeds only the nonuniform-bias experiments; theta = 0 is a valid
  // setting everywhere else.
  if (e == Experiment::kRmseNonuniform || e == Experiment::kGainCurve)
    check(*beta0 > 0.0, "beta0: must be > 0 for nonuniform-bias experiments");
  check(node_count >= 3, "node_count: must be >= 3");
  check(!rel_spreads.empty(), "rel_spreads: must not be empty");
  for (double s : rel_spreads) check(s >= 0.0, "rel_spreads: entries must be >= 0");
  check(spread_min > 0.0, "spread_min: must be > 0");
  check(spread_max > spread_min, "spread_max: must exceed spread_min");
  check(spread_points >= 2, "spread_points: must be >= 2");
  check(*design_level > 0.0, "design_level: must be > 0");
  check(phi_points >= 1, "phi_points: must be >= 1");
  check(*omega_s_min > 0.0, "omega_s_min: must be > 0");
  check(*omega_s_max > *omega_s_min, "omega_s_max: must exceed omega_s_min");
  check(*omega_s_points >= 8, "omega_s_points: must be >= 8");
  check(theta_min >= 0.0, "theta_min: must be >= 0");
  check(*theta_max <= kPi / 4.0, "theta_max: must be <= pi/4");
  check(theta_min < *theta_max, "theta_min: must be below theta_max");
  check(theta_points >= 16, "theta_points: must be >= 16");
  for (double s : *snr_grid) check(s > 0.0, "snr_grid: entries must be > 0");
  check(burn_in_periods >= 1, "burn_in_periods: must be >= 1");
  check(eval_periods >= 1, "eval_periods: must be >= 1");
  check(samples_per_period >= 2, "samples_per_period: must be >= 2");
  check(integrator_tol > 0.0, "integrator_tol: must be > 0");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<bool> seen(registry().size(), false);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    bool matched = false;
    for (std::size_t i = 0; i < registry().size(); ++i) {
      if (key != registry()[i].key) continue;
      if (seen[i]) throw ConfigError("duplicate config key '" + key + "'");
      registry()[i].set(cfg, value);
      seen[i] = true;
      matched = true;
      break;
    }
    if (!matched) throw ConfigError("unknown config key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const FieldDef& def : registry()) {
    const auto value = def.get(cfg);
    if (!value) continue;
    out += def.key;
    out += " = ";
    out += *value;
    out += "\n";
  }
  return out;
}

}  // namespace starkloop
