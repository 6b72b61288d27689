#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "picklab/config.hpp"
#include "picklab/inequality_lab.hpp"

namespace picklab {

inline constexpr const char* schema_version = "picklab-v1";
inline constexpr const char* inequality_header =
    "t,ell,agg_plus,agg_minus,t1p,t1m,t2p,t2m,t3p,t3m,t4p,t4m,gronwall_margin,deriv_residual";
inline constexpr const char* sweep_header =
    "N,t,alpha,gronwall_rhs,dist_m1,dist_m2,corollary_rhs_m1,corollary_rhs_m2,ell";

/// Fixed acceptance thresholds; echoed into every summary.
struct Thresholds {
  double cross_construction = 1e-12;
  double decomposition = 1e-9;
  double skew = 1e-10;
  double ratio_lo = 3.5;
  double ratio_hi = 4.5;
  double pi_eig = 1e-10;
  double pi_inverse = 1e-9;
  double nbody_norm = 1e-10;
  double hartree_norm = 1e-10;
  double hartree_energy = 1e-8;
  double propagator = 1e-10;
  double morphism = 1e-10;
  double seiringer_slack = 1e-10;
  double bound_slack = 1e-6;
};

struct RunOptions {
  std::string out_dir;      // empty: use config output_dir
  int threads = 0;          // 0: OpenMP default
  bool tight_ell = false;   // Gronwall/corollary/aggregate pass criteria use ell instead of L
  std::uint64_t seed = 20240601;
  bool write_files = true;
};

struct SampleRow {
  double t = 0.0;
  double alpha = 0.0;
  double ell = 0.0;
  double L = 0.0;
  double int_ell = 0.0;  // trapezoid integral of ell up to t
  double int_L = 0.0;
  MarginPair agg_ell;
  MarginPair agg_L;
  TermBoundMargins terms;
  BoundCheck gronwall_ell;
  BoundCheck gronwall_L;
  DerivativeCheck deriv;
  double deriv_ratio = 0.0;  // residual(2 fd_dt) / residual(fd_dt)
  double cross_err = 0.0;
  double cross_err_first_quantized = -1.0;  // -1 when N is above the first-quantization cap
  double decomposition_err = 0.0;
  double skew_max = 0.0;
  std::vector<SeiringerCheck> seiringer;  // m = 1..mmax
  std::vector<BoundCheck> corollary_ell;
  std::vector<BoundCheck> corollary_L;
  PiLemmaCheck pi;
  double nbody_norm_drift = 0.0;
  double hartree_norm_drift = 0.0;
  double energy_drift = 0.0;
};

struct MemberResult {
  int N = 0;
  std::vector<SampleRow> rows;
  double propagator_reconstruction = 0.0;
  double unitarity = 0.0;
  double hartree_max_norm_drift = 0.0;
  double hartree_max_energy_drift = 0.0;
  MorphismSuiteResult morphisms;
  double seconds = 0.0;
};

/// Runs one particle number. `full` adds the operator-level checks (C, T
/// terms, derivative identity, Pi_N checks, morphism suite); without it only the
/// quantities of the sweep table are computed.
MemberResult run_member(const ExperimentConfig& cfg, int N, const RunOptions& opt, bool full);

struct CheckResult {
  std::string name;
  bool pass = true;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct RunSummary {
  std::string command;
  std::vector<CheckResult> checks;
  std::vector<std::string> notices;
  double seconds = 0.0;
  bool pass() const;
  std::string to_json(const ExperimentConfig& cfg, const RunOptions& opt, const Thresholds& th) const;
};

/// Evaluates every check of a full member run.
std::vector<CheckResult> evaluate_checks(const MemberResult& m, const ExperimentConfig& cfg, const RunOptions& opt,
                                         const Thresholds& th, std::vector<std::string>& notices);

RunSummary run_verify(const ExperimentConfig& cfg, const RunOptions& opt);

struct SweepResult {
  std::vector<MemberResult> members;  // in increasing N
  RunSummary summary;
};

SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opt);

struct PowerFit {
  std::string quantity;
  bool degenerate = false;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double residual_rms = 0.0;
  int points = 0;
};

struct RateFit {
  PowerFit alpha;
  PowerFit dist_m1;
  PowerFit dist_m2;
  std::vector<int> N;
  std::string to_json() const;
};

/// sup values at or below this are treated as zero (rounding-level data).
inline constexpr double degenerate_floor = 1e-13;

/// Least-squares slope of log sup_t q against log N. Throws with fewer than
/// 4 distinct N; a quantity whose sup is zero for some N is reported degenerate.
PowerFit fit_power_law(const std::vector<double>& N, const std::vector<double>& sup_values, const std::string& name);
RateFit run_rate_fit(const std::string& sweep_csv);

}  // namespace picklab
