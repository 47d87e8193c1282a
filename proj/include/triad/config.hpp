#pragma once

// Run configuration: a flat TOML subset with a fixed schema.
//
//   # comment
//   [section]
//   key_hz = 1.5e9          numbers (inf / nan allowed)
//   key = "text"            strings
//   flag = true             booleans
//   list_hz = [1e9, 2e9]    arrays of numbers
//
// Every numeric key names its unit by suffix (_hz, _dbm, _db, _k, _s, _m,
// _kg, _w, _ratio, _n). Frequencies are ordinary (Hz) in the file and
// angular (rad/s) once loaded. Unknown keys are rejected.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "triad/errors.hpp"
#include "triad/hybridize.hpp"
#include "triad/model.hpp"
#include "triad/timedomain.hpp"
#include "triad/units.hpp"

namespace triad {

using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;
using ConfigTable = std::map<std::string, ConfigValue>;  // "section.key" -> value

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline double parse_number(const std::string& text, const std::string& where) {
  std::string t;
  for (char c : trim(text))
    if (c != '_') t.push_back(c);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan" || t == "+nan" || t == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: " + text);
  }
  if (used != t.size()) throw ConfigError(where + ": not a number: " + text);
  return v;
}

}  // namespace detail

inline ConfigTable parse_config(std::istream& in) {
  ConfigTable table;
  std::string section, raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no);
    const std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw ConfigError(where + ": expected key = value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.count(full)) throw ConfigError(where + ": duplicate key " + full);

    if (val.front() == '"') {
      if (val.size() < 2 || val.back() != '"') throw ConfigError(where + ": unterminated string");
      table[full] = val.substr(1, val.size() - 2);
    } else if (val == "true" || val == "false") {
      table[full] = val == "true";
    } else if (val.front() == '[') {
      if (val.back() != ']') throw ConfigError(where + ": unterminated array");
      std::vector<double> xs;
      std::stringstream ss(val.substr(1, val.size() - 2));
      std::string item;
      while (std::getline(ss, item, ','))
        if (!detail::trim(item).empty()) xs.push_back(detail::parse_number(item, where));
      table[full] = xs;
    } else {
      table[full] = detail::parse_number(val, where);
    }
  }
  return table;
}

inline ConfigTable parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

enum class KeyKind { Number, String, Bool, Array };

struct KeySpec {
  KeyKind kind;
  bool required;
};

inline const std::map<std::string, KeySpec>& config_schema() {
  static const std::map<std::string, KeySpec> s = {
      {"device.wavelength_m", {KeyKind::Number, false}},
      {"device.ring_detuning_hz", {KeyKind::Number, false}},
      {"device.j_hz", {KeyKind::Number, false}},
      {"device.g0_hz", {KeyKind::Number, true}},
      {"device.left_kappa_int_hz", {KeyKind::Number, true}},
      {"device.left_kappa_ex_hz", {KeyKind::Number, true}},
      {"device.right_kappa_int_hz", {KeyKind::Number, true}},
      {"device.right_kappa_ex_hz", {KeyKind::Number, true}},
      {"acoustic.freq_hz", {KeyKind::Array, true}},
      {"acoustic.kappa_hz", {KeyKind::Array, true}},
      {"acoustic.kappa_ex_hz", {KeyKind::Array, true}},
      {"acoustic.m_eff_kg", {KeyKind::Array, false}},
      {"losses.probes_db", {KeyKind::Number, false}},
      {"losses.fiber_chip_db", {KeyKind::Number, false}},
      {"pump.configuration", {KeyKind::String, true}},
      {"pump.power_dbm", {KeyKind::Number, true}},
      {"pump.detuning_hz", {KeyKind::Number, false}},
      {"sweep.start_hz", {KeyKind::Number, false}},
      {"sweep.stop_hz", {KeyKind::Number, false}},
      {"sweep.points_n", {KeyKind::Number, false}},
      {"sweep.power_start_dbm", {KeyKind::Number, false}},
      {"sweep.power_stop_dbm", {KeyKind::Number, false}},
      {"sweep.power_points_n", {KeyKind::Number, false}},
      {"sweep.power_list_dbm", {KeyKind::Array, false}},
      {"thermal.temperatures_k", {KeyKind::Array, false}},
      {"pulse.tau_on_s", {KeyKind::Number, false}},
      {"pulse.f_rep_hz", {KeyKind::Number, false}},
      {"pulse.edge_s", {KeyKind::Number, false}},
      {"pulse.delay_s", {KeyKind::Number, false}},
      {"pulse.shape", {KeyKind::String, false}},
      {"pulse.tau_rc_s", {KeyKind::Number, false}},
      {"pulse.t_end_s", {KeyKind::Number, false}},
      {"pulse.signal_power_dbm", {KeyKind::Number, false}},
      {"pulse.pump_on", {KeyKind::Bool, false}},
      {"fit.probes_db", {KeyKind::Number, false}},
      {"fit.fiber_fiber_db", {KeyKind::Number, false}},
      {"fit.eta_m_ratio", {KeyKind::Number, false}},
      {"fit.eta_o_ratio", {KeyKind::Number, false}},
      {"fit.kappa_o_hz", {KeyKind::Number, false}},
      {"fit.kappa_m_hz", {KeyKind::Number, false}},
      {"fit.wavelength_m", {KeyKind::Number, false}},
      {"fit.doublet_j_hz", {KeyKind::Number, false}},
  };
  return s;
}

inline bool has_unit_suffix(const std::string& key) {
  static const char* suffixes[] = {"_hz", "_dbm", "_db", "_k", "_s", "_m",
                                   "_kg", "_w", "_ratio", "_n"};
  for (const char* s : suffixes) {
    const std::string suf(s);
    if (key.size() > suf.size() && key.compare(key.size() - suf.size(), suf.size(), suf) == 0)
      return true;
  }
  return false;
}

/// Rejects unknown keys, wrong value kinds and (optionally) missing
/// required keys.
inline void validate_config(const ConfigTable& t, bool require_device = true) {
  const auto& schema = config_schema();
  for (const auto& [key, value] : t) {
    auto it = schema.find(key);
    if (it == schema.end()) {
      if (std::holds_alternative<double>(value) && !has_unit_suffix(key))
        throw ConfigError("config key " + key + " has no unit suffix");
      throw ConfigError("unknown config key " + key);
    }
    const KeyKind k = it->second.kind;
    const bool ok = (k == KeyKind::Number && std::holds_alternative<double>(value)) ||
                    (k == KeyKind::String && std::holds_alternative<std::string>(value)) ||
                    (k == KeyKind::Bool && std::holds_alternative<bool>(value)) ||
                    (k == KeyKind::Array && std::holds_alternative<std::vector<double>>(value));
    if (!ok) throw ConfigError("config key " + key + " has the wrong type");
  }
  for (const auto& [key, spec] : schema)
    if (require_device && spec.required && !t.count(key)) throw ConfigError("missing required config key " + key);
}

struct SweepGrid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
};

struct PulseSettings {
  PulseSequence sequence;
  double tau_rc = 30e-9;
  double t_end = 0.0;  // 0: delay + tau_on
  double signal_power = 1e-9;  // W on chip
  bool pump_on = true;
};

struct FitSettings {
  std::optional<double> probes;        // linear
  std::optional<double> fiber_fiber;   // linear
  std::optional<double> eta_m;
  std::optional<double> eta_o;
  std::optional<double> kappa_o;       // rad/s
  std::optional<double> kappa_m;       // rad/s
  std::optional<double> omega_L;
  std::optional<double> doublet_J;     // rad/s
};

struct RunConfig {
  DeviceParams device;
  PumpConfig pump;
  double pump_detuning = 0.0;  // rad/s
  std::optional<SweepGrid> grid;              // absolute microwave frequency, rad/s
  std::optional<SweepGrid> power_grid;        // dBm
  std::vector<double> power_list_dbm;
  std::vector<double> temperatures;           // K
  PulseSettings pulse;
  FitSettings fit;
};

namespace detail {

struct Reader {
  const ConfigTable& t;
  double num(const std::string& k, double def) const {
    auto it = t.find(k);
    return it == t.end() ? def : std::get<double>(it->second);
  }
  std::optional<double> opt(const std::string& k) const {
    auto it = t.find(k);
    if (it == t.end()) return std::nullopt;
    return std::get<double>(it->second);
  }
  std::vector<double> arr(const std::string& k) const {
    auto it = t.find(k);
    return it == t.end() ? std::vector<double>{} : std::get<std::vector<double>>(it->second);
  }
  std::string str(const std::string& k, const std::string& def) const {
    auto it = t.find(k);
    return it == t.end() ? def : std::get<std::string>(it->second);
  }
  bool flag(const std::string& k, bool def) const {
    auto it = t.find(k);
    return it == t.end() ? def : std::get<bool>(it->second);
  }
};

inline std::size_t as_count(double v, const std::string& key) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e8)
    throw ConfigError(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// The [fit] section alone; the device sections may be absent.
inline FitSettings read_fit_settings(const ConfigTable& t) {
  validate_config(t, false);
  const detail::Reader r{t};
  FitSettings ft;
  if (auto v = r.opt("fit.probes_db")) ft.probes = db_to_linear(*v);
  if (auto v = r.opt("fit.fiber_fiber_db")) ft.fiber_fiber = db_to_linear(*v);
  ft.eta_m = r.opt("fit.eta_m_ratio");
  ft.eta_o = r.opt("fit.eta_o_ratio");
  if (auto v = r.opt("fit.kappa_o_hz")) ft.kappa_o = hz_to_angular(*v);
  if (auto v = r.opt("fit.kappa_m_hz")) ft.kappa_m = hz_to_angular(*v);
  if (auto v = r.opt("fit.wavelength_m")) ft.omega_L = wavelength_to_angular(*v);
  if (auto v = r.opt("fit.doublet_j_hz")) ft.doublet_J = hz_to_angular(*v);
  return ft;
}

inline Configuration parse_configuration(const std::string& s) {
  if (s == "anti-stokes" || s == "antistokes" || s == "anti_stokes") return Configuration::AntiStokes;
  if (s == "stokes") return Configuration::Stokes;
  throw ConfigError("pump.configuration must be \"anti-stokes\" or \"stokes\", got \"" + s + "\"");
}

inline RunConfig load_config(const ConfigTable& t) {
  validate_config(t);
  const detail::Reader r{t};
  RunConfig c;

  const double lambda = r.num("device.wavelength_m", kDefaultWavelength);
  if (!(lambda > 0.0)) throw ConfigError("device.wavelength_m must be positive");
  const double omega_L = wavelength_to_angular(lambda);
  c.pump.omega_L = omega_L;
  c.pump.configuration = parse_configuration(r.str("pump.configuration", ""));
  const double p_dbm = r.num("pump.power_dbm", 0.0);
  if (std::isnan(p_dbm) || p_dbm == std::numeric_limits<double>::infinity())
    throw ConfigError("pump.power_dbm must be finite or -inf");
  c.pump.power_in = p_dbm == -std::numeric_limits<double>::infinity() ? 0.0 : dbm_to_watts(p_dbm);
  c.pump_detuning = hz_to_angular(r.num("pump.detuning_hz", 0.0));

  auto& d = c.device;
  const auto f = r.arr("acoustic.freq_hz");
  const auto k = r.arr("acoustic.kappa_hz");
  const auto ke = r.arr("acoustic.kappa_ex_hz");
  const auto me = r.arr("acoustic.m_eff_kg");
  if (f.empty()) throw ConfigError("acoustic.freq_hz must list at least one mode");
  if (k.size() != f.size() || ke.size() != f.size())
    throw ConfigError("acoustic arrays must have equal length");
  if (me.size() > f.size()) throw ConfigError("acoustic.m_eff_kg longer than acoustic.freq_hz");
  for (std::size_t i = 0; i < f.size(); ++i) {
    AcousticMode m;
    m.omega_m = hz_to_angular(f[i]);
    m.kappa_m = hz_to_angular(k[i]);
    m.kappa_ex_m = hz_to_angular(ke[i]);
    if (i < me.size()) m.m_eff = me[i];
    d.acoustic_modes.push_back(m);
  }
  const double delta = hz_to_angular(r.num("device.ring_detuning_hz", 0.0));
  d.left = {omega_L + 0.5 * delta, hz_to_angular(r.num("device.left_kappa_int_hz", 0.0)),
            hz_to_angular(r.num("device.left_kappa_ex_hz", 0.0))};
  d.right = {omega_L - 0.5 * delta, hz_to_angular(r.num("device.right_kappa_int_hz", 0.0)),
             hz_to_angular(r.num("device.right_kappa_ex_hz", 0.0))};
  d.g0 = hz_to_angular(r.num("device.g0_hz", 0.0));
  d.losses.eta_probes = db_to_linear(r.num("losses.probes_db", 0.0));
  d.losses.eta_fiber_chip = db_to_linear(r.num("losses.fiber_chip_db", 0.0));
  try {
    validate(d.left, "left ring");
    validate(d.right, "right ring");
    validate(d.acoustic_modes.front());
    const auto j = r.opt("device.j_hz");
    d.J = j ? hz_to_angular(*j)
            : coupling_for_triple_resonance(d.left, d.right, d.transduction_mode().omega_m);
    validate(d);
    validate(c.pump);
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("invalid device: ") + e.what());
  }

  if (t.count("sweep.start_hz") || t.count("sweep.stop_hz") || t.count("sweep.points_n")) {
    SweepGrid g;
    g.start = hz_to_angular(r.num("sweep.start_hz", 0.0));
    g.stop = hz_to_angular(r.num("sweep.stop_hz", 0.0));
    g.points = detail::as_count(r.num("sweep.points_n", 0.0), "sweep.points_n");
    c.grid = g;
  }
  if (t.count("sweep.power_start_dbm") || t.count("sweep.power_stop_dbm") ||
      t.count("sweep.power_points_n")) {
    SweepGrid g;
    g.start = r.num("sweep.power_start_dbm", 0.0);
    g.stop = r.num("sweep.power_stop_dbm", 0.0);
    g.points = detail::as_count(r.num("sweep.power_points_n", 0.0), "sweep.power_points_n");
    c.power_grid = g;
  }
  c.power_list_dbm = r.arr("sweep.power_list_dbm");
  c.temperatures = r.arr("thermal.temperatures_k");
  for (double T : c.temperatures)
    if (!(T >= 0.0)) throw ConfigError("thermal.temperatures_k must be non-negative");

  auto& p = c.pulse;
  p.sequence.tau_on = r.num("pulse.tau_on_s", 1e-6);
  p.sequence.f_rep = r.num("pulse.f_rep_hz", 100e3);
  p.sequence.edge_time = r.num("pulse.edge_s", 0.0);
  p.sequence.delay = r.num("pulse.delay_s", 0.0);
  const std::string shape = r.str("pulse.shape", "rect");
  if (shape == "rect")
    p.sequence.shape = PulseShape::Rect;
  else if (shape == "raised-cosine")
    p.sequence.shape = PulseShape::RaisedCosine;
  else
    throw ConfigError("pulse.shape must be \"rect\" or \"raised-cosine\"");
  p.tau_rc = r.num("pulse.tau_rc_s", 30e-9);
  p.t_end = r.num("pulse.t_end_s", 0.0);
  p.signal_power = dbm_to_watts(r.num("pulse.signal_power_dbm", -30.0));
  p.pump_on = r.flag("pulse.pump_on", true);
  try {
    p.sequence.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  if (!(p.tau_rc > 0.0)) throw ConfigError("pulse.tau_rc_s must be positive");

  c.fit = read_fit_settings(t);
  return c;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return load_config(parse_config(in));
}

/// FNV-1a 64-bit hash, used to stamp outputs with the config they came from.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace triad
