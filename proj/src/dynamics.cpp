#include "picklab/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "picklab/csv.hpp"
#include "picklab/second_quantization.hpp"

namespace picklab {

SymOperator hamiltonian_matrix(const GridGeometry& g, const PairPotential& v, const BasisPtr& basis) {
  if (basis->modes() != g.d() || v.d() != g.d()) throw DimensionMismatch("hamiltonian: inconsistent d");
  const OneBodyOperator K(g.kinetic_matrix().cast<cplx>(), true);
  SymOperator H = static_cast<double>(basis->particles()) * lift_mn(K, basis);
  H += lift_pair_sum(v.values(), basis);
  return H.hermitian_part();
}

NBodyPropagator::NBodyPropagator(SymOperator H, double hbar) : H_(std::move(H)), hbar_(hbar) {
  if (!(hbar > 0.0)) throw Error("propagator: hbar must be positive");
  H_ = H_.hermitian_part();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H_.matrix());
  if (es.info() != Eigen::Success) throw Error("propagator: eigensolver failed");
  eval_ = es.eigenvalues();
  evec_ = es.eigenvectors();
}

double NBodyPropagator::reconstruction_error() const {
  const Matrix R = evec_ * eval_.cast<cplx>().asDiagonal() * evec_.adjoint();
  const double scale = H_.matrix().cwiseAbs().maxCoeff();
  return (R - H_.matrix()).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

Matrix NBodyPropagator::unitary(double t) const {
  Vector phase(eval_.size());
  for (Eigen::Index i = 0; i < eval_.size(); ++i) phase(i) = std::exp(-I_unit * (eval_(i) * t / hbar_));
  return evec_ * phase.asDiagonal() * evec_.adjoint();
}

Vector NBodyPropagator::propagate(const Vector& Psi0, double t) const {
  if (Psi0.size() != evec_.rows()) throw DimensionMismatch("propagate: state does not match sector");
  Vector c = evec_.adjoint() * Psi0;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-I_unit * (eval_(i) * t / hbar_));
  return evec_ * c;
}

SymOperator NBodyPropagator::heisenberg(const SymOperator& X, double t) const {
  const Matrix U = unitary(t);
  return {X.basis_ptr(), U.adjoint() * X.matrix() * U};
}

SymOperator NBodyPropagator::heisenberg_lift(const OneBodyOperator& A, double t) const {
  SymOperator out = heisenberg(lift_mn(A, basis()), t);
  return A.hermitian() ? out.hermitian_part() : out;
}

NBodyPropagator build_hamiltonian(const GridGeometry& g, const PairPotential& v, const BasisPtr& basis) {
  return NBodyPropagator(hamiltonian_matrix(g, v, basis), g.hbar());
}

namespace {

Vector apply_kinetic(const Vector& psi, const GridGeometry& g) {
  // K is a circulant stencil; a dense d x d product is the cheapest at desk scale
  return g.kinetic_matrix().cast<cplx>() * psi;
}

}  // namespace

Vector hartree_rhs(const Vector& psi, const GridGeometry& g, const PairPotential& v) {
  const RealVector W = mean_field_values(v, psi, g);
  const Vector Hpsi = apply_kinetic(psi, g) + W.cast<cplx>().cwiseProduct(psi);
  return Hpsi / (I_unit * g.hbar());
}

double hartree_energy(const Vector& psi, const GridGeometry& g, const PairPotential& v) {
  const RealVector W = mean_field_values(v, psi, g);
  const double kin = g.inner(psi, apply_kinetic(psi, g)).real();
  const double pot = g.inner(psi, W.cast<cplx>().cwiseProduct(psi)).real();
  return kin + 0.5 * pot;
}

HartreeMethod parse_hartree_method(const std::string& s) {
  if (s == "rk4") return HartreeMethod::rk4;
  if (s == "strang") return HartreeMethod::strang;
  throw Error("unknown integrator '" + s + "' (expected rk4 or strang)");
}

Vector rk4_step(const Vector& psi, double dt, const GridGeometry& g, const PairPotential& v) {
  const Vector k1 = hartree_rhs(psi, g, v);
  const Vector k2 = hartree_rhs(psi + 0.5 * dt * k1, g, v);
  const Vector k3 = hartree_rhs(psi + 0.5 * dt * k2, g, v);
  const Vector k4 = hartree_rhs(psi + dt * k3, g, v);
  return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector strang_step(const Vector& psi, double dt, const GridGeometry& g, const PairPotential& v) {
  const Matrix F = g.dft_matrix();
  const RealVector s = g.laplacian_symbol();
  Vector half(g.d());
  for (int k = 0; k < g.d(); ++k) half(k) = std::exp(-I_unit * (0.25 * dt * g.hbar() * s(k)));
  auto kinetic_half = [&](const Vector& f) -> Vector { return F.adjoint() * half.cwiseProduct(F * f); };

  Vector a = kinetic_half(psi);
  const RealVector W = mean_field_values(v, a, g);  // |a|^2 is invariant under the potential step
  for (int j = 0; j < g.d(); ++j) a(j) *= std::exp(-I_unit * (dt * W(j) / g.hbar()));
  return kinetic_half(a);
}

HartreeTrajectory hartree_integrate(const Vector& psi0, const GridGeometry& g, const PairPotential& v,
                                    double tmax, double dt, HartreeMethod method, int sample_stride) {
  if (!(dt > 0.0)) throw Error("hartree_integrate: dt must be positive");
  if (!(tmax >= dt)) throw Error("hartree_integrate: tmax must be >= dt");
  if (sample_stride < 1) throw Error("hartree_integrate: sample_stride must be >= 1");
  const double ratio = tmax / dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw Error("hartree_integrate: tmax/dt is not an integer, samples would miss step boundaries");

  HartreeTrajectory tr;
  tr.dt = dt;
  tr.stride = sample_stride;
  const double n0 = g.norm(psi0);
  const double e0 = hartree_energy(psi0, g, v);
  auto record = [&](long step, const Vector& psi) {
    const double nd = std::abs(g.norm(psi) - n0);
    const double ed = std::abs(hartree_energy(psi, g, v) - e0);
    tr.times.push_back(static_cast<double>(step) * dt);
    tr.psi.push_back(psi);
    tr.norm_drift.push_back(nd);
    tr.energy_drift.push_back(ed);
  };

  Vector psi = psi0;
  record(0, psi);
  for (long step = 1; step <= steps; ++step) {
    psi = method == HartreeMethod::rk4 ? rk4_step(psi, dt, g, v) : strang_step(psi, dt, g, v);
    const double nd = std::abs(g.norm(psi) - n0);
    tr.max_norm_drift = std::max(tr.max_norm_drift, nd);
    tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(hartree_energy(psi, g, v) - e0));
    if (!(nd <= hartree_instability_tol)) {
      std::ostringstream msg;
      msg << "hartree_integrate: instability at t=" << static_cast<double>(step) * dt << ", norm drift " << nd
          << " exceeds " << hartree_instability_tol << " (reduce dt)";
      throw Error(msg.str());
    }
    if (step % sample_stride == 0) record(step, psi);
  }
  return tr;
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& t,
                          const std::vector<double>& norm_drift, const std::vector<double>& energy_drift) {
  CsvWriter w(path, "t,norm_drift,energy_drift");
  for (std::size_t i = 0; i < t.size(); ++i) w.row({t[i], norm_drift[i], energy_drift[i]});
}

}  // namespace picklab
