#include "picklab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace picklab {

PotentialKind parse_potential_kind(const std::string& s) {
  if (s == "gaussian") return PotentialKind::gaussian;
  if (s == "soft_coulomb") return PotentialKind::soft_coulomb;
  if (s == "box") return PotentialKind::box;
  if (s == "custom_table") return PotentialKind::custom_table;
  throw Error("unknown potential kind '" + s + "'");
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::soft_coulomb: return "soft_coulomb";
    case PotentialKind::box: return "box";
    case PotentialKind::custom_table: return "custom_table";
  }
  return "?";
}

bool is_even_table(const RealVector& v) {
  const int d = static_cast<int>(v.size());
  if (d == 0) return true;
  const double scale = std::max(v.cwiseAbs().maxCoeff(), 1.0);
  for (int k = 0; k < d; ++k)
    if (std::abs(v(k) - v((d - k) % d)) > 1e-12 * scale) return false;
  return true;
}

PairPotential::PairPotential(PotentialKind kind, PotentialParams params, RealVector values)
    : kind_(kind), params_(params), values_(std::move(values)) {
  if (values_.size() < 1) throw Error("pair potential: empty table");
  if (!values_.allFinite()) throw Error("pair potential: non-finite value");
  if (!is_even_table(values_)) throw Error("pair potential: table is not even, v(x) != v(-x)");
}

Matrix PairPotential::two_body_matrix() const {
  const int n = d();
  Matrix W = Matrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) W(i * n + j, i * n + j) = at(i - j);
  return W;
}

PairPotential build_potential(PotentialKind kind, const PotentialParams& p, const GridGeometry& g) {
  RealVector v(g.d());
  switch (kind) {
    case PotentialKind::gaussian:
      if (!(p.sigma > 0.0)) throw Error("gaussian potential: sigma must be positive");
      break;
    case PotentialKind::soft_coulomb:
      if (!(p.eps > 0.0)) throw Error("soft_coulomb potential: eps must be positive");
      break;
    case PotentialKind::box:
      if (!(p.width > 0.0)) throw Error("box potential: width must be positive");
      break;
    case PotentialKind::custom_table:
      throw Error("custom_table potentials are loaded with load_custom_table");
  }
  for (int k = 0; k < g.d(); ++k) {
    const double x = g.difference(k);
    switch (kind) {
      case PotentialKind::gaussian: v(k) = p.g * std::exp(-x * x / (2.0 * p.sigma * p.sigma)); break;
      case PotentialKind::soft_coulomb: v(k) = p.g / std::sqrt(x * x + p.eps * p.eps); break;
      case PotentialKind::box: v(k) = std::abs(x) <= p.width ? p.g : 0.0; break;
      case PotentialKind::custom_table: break;
    }
  }
  // for even d the difference -L/2 has no separate mirror on the grid; the
  // formulas above depend on |x| only, so the table is even by construction
  return PairPotential(kind, p, std::move(v));
}

PairPotential load_custom_table(const std::string& path, const GridGeometry& g) {
  std::ifstream in(path);
  if (!in) throw Error("custom_table: cannot open '" + path + "'");
  const int d = g.d();
  RealVector v = RealVector::Zero(d);
  std::vector<bool> seen(d, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    long idx = 0;
    double val = 0.0;
    if (!(ls >> idx >> val)) {
      if (lineno == 1) continue;  // header
      throw Error("custom_table: " + path + ":" + std::to_string(lineno) + ": expected 'x_index,value'");
    }
    const int k = static_cast<int>(((idx % d) + d) % d);
    if (seen[k]) throw Error("custom_table: " + path + ":" + std::to_string(lineno) + ": duplicate index");
    seen[k] = true;
    v(k) = val;
  }
  for (int k = 0; k < d; ++k)
    if (!seen[k]) throw Error("custom_table: " + path + ": missing index " + std::to_string(k));
  return PairPotential(PotentialKind::custom_table, PotentialParams{}, std::move(v));
}

FourierModes::FourierModes(const PairPotential& v, const GridGeometry& g) {
  const int d = g.d();
  if (v.d() != d) throw DimensionMismatch("fourier modes: potential and geometry disagree on d");
  omegas_.resize(d);
  vhat_.resize(d);
  double imag_max = 0.0;
  for (int k = 0; k < d; ++k) {
    omegas_(k) = g.frequency(k);
    cplx s = 0.0;
    for (int m = 0; m < d; ++m) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * m) % d) / d;
      s += v.values()(m) * cplx(std::cos(phase), std::sin(phase));
    }
    vhat_(k) = s.real();
    imag_max = std::max(imag_max, std::abs(s.imag()));
  }
  const double scale = std::max(vhat_.cwiseAbs().maxCoeff(), 1.0);
  if (imag_max > 1e-12 * scale) throw Error("fourier modes: transform of the potential is not real");

  E_.reserve(d);
  for (int k = 0; k < d; ++k) {
    Vector diag(d);
    for (int j = 0; j < d; ++j) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * j) % d) / d;
      diag(j) = cplx(std::cos(phase), std::sin(phase));
    }
    E_.emplace_back(Matrix(diag.asDiagonal()));
  }

  for (int m = 0; m < d; ++m) {
    cplx s = 0.0;
    for (int k = 0; k < d; ++k) s += vhat_(k) * E_[k].matrix()(m, m);
    reconstruction_error_ = std::max(reconstruction_error_, std::abs(s / static_cast<double>(d) - v.values()(m)));
  }
}

L2LinfSplit l2_linf_decomposition(const RealVector& v, double h) {
  const Eigen::Index n = v.size();
  std::vector<double> a(v.data(), v.data() + n);
  for (double& x : a) x = std::abs(x);
  std::sort(a.begin(), a.end());

  auto value = [&](double c) {
    double s = 0.0;
    for (double x : a)
      if (x > c) s += (x - c) * (x - c);
    return std::sqrt(h * s) + c;
  };

  std::vector<double> candidates{0.0};
  candidates.insert(candidates.end(), a.begin(), a.end());
  // Inside (b_r, b_{r+1}) the active set is fixed and f is smooth; its
  // stationary points solve (h m^2 - m) c^2 + 2 S (1 - h m) c + (h S^2 - Q) = 0.
  double lo = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double hi = a[r];
    if (hi > lo) {
      double m = 0, S = 0, Q = 0;
      for (std::size_t q = r; q < a.size(); ++q) {
        m += 1;
        S += a[q];
        Q += a[q] * a[q];
      }
      const double A = h * m * m - m, B = 2.0 * S * (1.0 - h * m), C = h * S * S - Q;
      std::vector<double> roots;
      if (std::abs(A) > 1e-300) {
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
          roots.push_back((-B + std::sqrt(disc)) / (2.0 * A));
          roots.push_back((-B - std::sqrt(disc)) / (2.0 * A));
        }
      } else if (std::abs(B) > 1e-300) {
        roots.push_back(-C / B);
      }
      for (double c : roots)
        if (c > lo && c < hi) candidates.push_back(c);
    }
    lo = hi;
  }

  L2LinfSplit best;
  best.norm = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    const double f = value(c);
    if (f < best.norm) {
      best.norm = f;
      best.cutoff = c;
    }
  }
  best.v2 = v.cwiseMax(-best.cutoff).cwiseMin(best.cutoff);
  best.v1 = v - best.v2;
  return best;
}

RealVector mean_field_values(const PairPotential& v, const Vector& psi, const GridGeometry& g) {
  const int d = g.d();
  if (psi.size() != d || v.d() != d) throw DimensionMismatch("mean_field: dimension mismatch");
  const RealVector rho = psi.cwiseAbs2();
  RealVector W(d);
  for (int x = 0; x < d; ++x) {
    double s = 0.0;
    for (int y = 0; y < d; ++y) s += v.at(x - y) * rho(y);
    W(x) = g.h() * s;
  }
  return W;
}

OneBodyOperator mean_field_potential(const PairPotential& v, const Vector& psi, const GridGeometry& g) {
  return OneBodyOperator::diagonal(mean_field_values(v, psi, g));
}

double ell_functional(const PairPotential& v, const Vector& psi, const GridGeometry& g) {
  const int d = g.d();
  if (psi.size() != d || v.d() != d) throw DimensionMismatch("ell: dimension mismatch");
  const RealVector rho = psi.cwiseAbs2();
  double best = 0.0;
  for (int x = 0; x < d; ++x) {
    double s = 0.0;
    for (int y = 0; y < d; ++y) s += v.at(x - y) * v.at(x - y) * rho(y);
    best = std::max(best, g.h() * s);
  }
  return std::sqrt(best);
}

double h2_norm(const Vector& psi, const GridGeometry& g) {
  const Matrix A = Matrix::Identity(g.d(), g.d()) - g.laplacian_matrix().cast<cplx>();
  return g.norm(A * psi);
}

double L_functional(const PairPotential& v, const Vector& psi, const GridGeometry& g, double sobolev_constant) {
  const double dec = l2_linf_decomposition(v.values(), g.h()).norm;
  return 2.0 * std::max(1.0, sobolev_constant) * dec * h2_norm(psi, g);
}

double discrete_sobolev_constant(const GridGeometry& g) {
  const RealVector s = g.laplacian_symbol();
  double acc = 0.0;
  for (int k = 0; k < g.d(); ++k) acc += 1.0 / ((1.0 + s(k)) * (1.0 + s(k)));
  return std::sqrt(acc / g.L());
}

}  // namespace picklab
