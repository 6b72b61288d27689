#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "picklab/dynamics.hpp"
#include "picklab/geometry.hpp"
#include "picklab/potentials.hpp"

namespace picklab {

/// Raised for malformed configuration files; carries the offending line and key.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& key, const std::string& msg);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

enum class InitialKind { gaussian, plane_wave };

struct ExperimentConfig {
  // geometry
  int d = 4;
  double L = 6.283185307179586;
  double hbar = 1.0;
  Laplacian laplacian = Laplacian::three_point;

  std::vector<int> N_values{3};

  PotentialKind potential_kind = PotentialKind::soft_coulomb;
  PotentialParams potential;
  std::string potential_table;  // custom_table CSV, relative to the config file

  InitialKind initial_kind = InitialKind::gaussian;
  double initial_center = 3.141592653589793;
  double initial_width = 0.7853981633974483;
  double initial_momentum = 1.0;
  int initial_mode = 1;

  double tmax = 1.0;
  double dt = 1e-3;
  int sample_stride = 250;
  HartreeMethod method = HartreeMethod::rk4;

  double margin_tol = 1e-8;
  double fd_dt = 1e-4;
  double deriv_tol = 1e-5;

  std::size_t sector_cap = 20000;
  int reduced_cap = 2;
  int first_quantization_cap = 4;

  double sobolev_constant = 1.0;
  int morphism_instances = 200;
  std::string output_dir = ".";
  std::string mode = "verify";

  /// Every key actually present in the file, in file order, for the summary echo.
  std::vector<std::pair<std::string, std::string>> echo;

  GridGeometry geometry() const { return GridGeometry(d, L, hbar, laplacian); }
  PairPotential build_pair_potential() const;
  Vector initial_wavefunction() const;
};

/// Flat key=value text; '#' starts a comment; dotted keys name sections
/// (geometry.d = 4). Unknown or repeated keys and unparsable values raise
/// ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// "3", "2..6" or "2,3,5".
std::vector<int> parse_int_list(const std::string& s);

}  // namespace picklab
