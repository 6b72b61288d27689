#include "picklab/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "picklab/state.hpp"

namespace picklab {

ConfigError::ConfigError(int line, const std::string& key, const std::string& msg)
    : Error("config line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " + msg),
      line_(line),
      key_(key) {}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("expected a number, got '" + s + "'");
  return v;
}

long to_long(const std::string& s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error("expected an integer, got '" + s + "'");
  return v;
}

double positive(double v) {
  if (!(v > 0.0)) throw Error("must be positive");
  return v;
}

int positive_int(long v) {
  if (v < 1) throw Error("must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

std::vector<int> parse_int_list(const std::string& raw) {
  const std::string s = trim(raw);
  std::vector<int> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const long a = to_long(trim(s.substr(0, dots)));
    const long b = to_long(trim(s.substr(dots + 2)));
    if (b < a) throw Error("empty range '" + s + "'");
    for (long n = a; n <= b; ++n) out.push_back(static_cast<int>(n));
  } else {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_long(trim(item))));
  }
  if (out.empty()) throw Error("empty list");
  std::set<int> uniq(out.begin(), out.end());
  if (uniq.size() != out.size()) throw Error("repeated value in list '" + s + "'");
  for (int n : out)
    if (n < 1) throw Error("particle numbers must be >= 1");
  std::sort(out.begin(), out.end());
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"geometry.d", [&](const std::string& v) { c.d = positive_int(to_long(v)); }},
      {"geometry.L", [&](const std::string& v) { c.L = positive(to_double(v)); }},
      {"geometry.hbar", [&](const std::string& v) { c.hbar = positive(to_double(v)); }},
      {"geometry.laplacian",
       [&](const std::string& v) {
         if (v == "three_point") c.laplacian = Laplacian::three_point;
         else if (v == "spectral") c.laplacian = Laplacian::spectral;
         else throw Error("expected three_point or spectral");
       }},
      {"N", [&](const std::string& v) { c.N_values = {positive_int(to_long(v))}; }},
      {"N_range", [&](const std::string& v) { c.N_values = parse_int_list(v); }},
      {"potential.kind", [&](const std::string& v) { c.potential_kind = parse_potential_kind(v); }},
      {"potential.g", [&](const std::string& v) { c.potential.g = to_double(v); }},
      {"potential.sigma", [&](const std::string& v) { c.potential.sigma = positive(to_double(v)); }},
      {"potential.eps", [&](const std::string& v) { c.potential.eps = positive(to_double(v)); }},
      {"potential.width", [&](const std::string& v) { c.potential.width = positive(to_double(v)); }},
      {"potential.table",
       [&](const std::string& v) {
         const std::filesystem::path p(v);
         c.potential_table = p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).string();
       }},
      {"initial.kind",
       [&](const std::string& v) {
         if (v == "gaussian") c.initial_kind = InitialKind::gaussian;
         else if (v == "plane_wave") c.initial_kind = InitialKind::plane_wave;
         else throw Error("expected gaussian or plane_wave");
       }},
      {"initial.center", [&](const std::string& v) { c.initial_center = to_double(v); }},
      {"initial.width", [&](const std::string& v) { c.initial_width = positive(to_double(v)); }},
      {"initial.momentum", [&](const std::string& v) { c.initial_momentum = to_double(v); }},
      {"initial.mode", [&](const std::string& v) { c.initial_mode = static_cast<int>(to_long(v)); }},
      {"time.tmax", [&](const std::string& v) { c.tmax = positive(to_double(v)); }},
      {"time.dt", [&](const std::string& v) { c.dt = positive(to_double(v)); }},
      {"time.sample_stride", [&](const std::string& v) { c.sample_stride = positive_int(to_long(v)); }},
      {"time.method", [&](const std::string& v) { c.method = parse_hartree_method(v); }},
      {"tolerances.margin_tol", [&](const std::string& v) { c.margin_tol = positive(to_double(v)); }},
      {"tolerances.fd_dt", [&](const std::string& v) { c.fd_dt = positive(to_double(v)); }},
      {"tolerances.deriv_tol", [&](const std::string& v) { c.deriv_tol = positive(to_double(v)); }},
      {"caps.sector_cap", [&](const std::string& v) { c.sector_cap = static_cast<std::size_t>(positive_int(to_long(v))); }},
      {"caps.reduced_cap",
       [&](const std::string& v) {
         c.reduced_cap = positive_int(to_long(v));
         if (c.reduced_cap > 3) throw Error("reduced_cap above 3 is not supported");
       }},
      {"caps.first_quantization_cap", [&](const std::string& v) { c.first_quantization_cap = positive_int(to_long(v)); }},
      {"sobolev_constant", [&](const std::string& v) { c.sobolev_constant = positive(to_double(v)); }},
      {"morphism_instances", [&](const std::string& v) { c.morphism_instances = positive_int(to_long(v)); }},
      {"output_dir", [&](const std::string& v) { c.output_dir = v; }},
      {"mode",
       [&](const std::string& v) {
         if (v != "verify" && v != "sweep" && v != "rate_fit") throw Error("expected verify, sweep or rate_fit");
         c.mode = v;
       }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "", "missing key");
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(lineno, key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(lineno, key, "key given twice");
    if ((key == "N" && seen.count("N_range")) || (key == "N_range" && seen.count("N")))
      throw ConfigError(lineno, key, "N and N_range are mutually exclusive");
    if (value.empty()) throw ConfigError(lineno, key, "missing value");
    try {
      it->second(value);
    } catch (const Error& e) {
      throw ConfigError(lineno, key, e.what());
    }
    c.echo.emplace_back(key, value);
  }
  if (c.potential_kind == PotentialKind::custom_table && c.potential_table.empty())
    throw ConfigError(lineno, "potential.table", "custom_table potential needs potential.table");
  if (c.d < 2) throw ConfigError(lineno, "geometry.d", "need at least 2 modes");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

PairPotential ExperimentConfig::build_pair_potential() const {
  const GridGeometry g = geometry();
  if (potential_kind == PotentialKind::custom_table) return load_custom_table(potential_table, g);
  return build_potential(potential_kind, potential, g);
}

Vector ExperimentConfig::initial_wavefunction() const {
  const GridGeometry g = geometry();
  if (initial_kind == InitialKind::plane_wave) return plane_wave(g, initial_mode);
  return gaussian_wavefunction(g, initial_center, initial_width, initial_momentum);
}

}  // namespace picklab
