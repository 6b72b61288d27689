#include "picklab/inequality_lab.hpp"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "picklab/first_quantization.hpp"
#include "picklab/linalg.hpp"
#include "picklab/second_quantization.hpp"

namespace picklab {

SampleContext make_context(const NBodyPropagator& prop, const GridGeometry& g, const PairPotential& v,
                           const Vector& psi, double t) {
  return {prop.basis(), projector_pair(psi, g), mean_field_values(v, psi, g), prop.unitary(t), t};
}

SymOperator conjugate(const Matrix& U, const SymOperator& X) {
  return {X.basis_ptr(), U.adjoint() * X.matrix() * U};
}

namespace {

Matrix lift(const Matrix& A, const BasisPtr& basis) { return lift_mn(OneBodyOperator(A), basis).matrix(); }

Matrix diag(const RealVector& W) { return Matrix(W.cast<cplx>().asDiagonal()); }

// M^in([W, R]) at the "in" level
Matrix mean_field_piece(const SampleContext& ctx) {
  const Matrix Wm = diag(ctx.W);
  const Matrix& R = ctx.pair.R.matrix();
  return lift(Wm * R - R * Wm, ctx.basis);
}

Matrix full_fourier_in(const FourierModes& modes, const SampleContext& ctx) {
  const auto D = static_cast<Eigen::Index>(ctx.basis->size());
  const Matrix& R = ctx.pair.R.matrix();
  Matrix acc = Matrix::Zero(D, D);
  for (int k = 0; k < modes.size(); ++k) {
    const double vh = modes.vhat()(k);
    if (vh == 0.0) continue;
    const Matrix& E = modes.E(k).matrix();
    const Matrix Es = E.adjoint();
    const Matrix mEs = lift(Es, ctx.basis);
    acc += vh * (mEs * lift(E * R, ctx.basis) - lift(R * E, ctx.basis) * mEs);
  }
  return acc / static_cast<double>(modes.size());
}

}  // namespace

SymOperator c_operator_full_fourier(const FourierModes& modes, const SampleContext& ctx) {
  return conjugate(ctx.U, SymOperator(ctx.basis, full_fourier_in(modes, ctx)));
}

SymOperator c_operator_fourier(const FourierModes& modes, const SampleContext& ctx) {
  return conjugate(ctx.U, SymOperator(ctx.basis, full_fourier_in(modes, ctx) - mean_field_piece(ctx)));
}

SymOperator c_operator_direct(const PairPotential& v, const SampleContext& ctx, DirectRoute route,
                              int first_quantization_cap) {
  const int N = ctx.basis->particles();
  const int d = ctx.basis->modes();
  const Matrix& R = ctx.pair.R.matrix();
  const Matrix V = v.two_body_matrix();
  const Matrix Wm = diag(ctx.W);
  const Matrix WR = Wm * R - R * Wm;
  const double n2 = static_cast<double>(N) * N;

  Matrix in;
  if (route == DirectRoute::second_quantized) {
    const Matrix IR = Eigen::kroneckerProduct(Matrix::Identity(d, d), R);
    in = (second_quantize_two_body(V * IR, *ctx.basis) - second_quantize_two_body(IR * V, *ctx.basis)) / n2 -
         lift(WR, ctx.basis);
  } else {
    if (N > first_quantization_cap) throw Error("c_operator_direct: N above first-quantization cap");
    const auto full = static_cast<Eigen::Index>(first_quantization::full_dimension(N, d));
    Matrix acc = Matrix::Zero(full, full);
    Matrix mf = Matrix::Zero(full, full);
    for (int l = 1; l <= N; ++l) {
      const Matrix JR = first_quantization::slot_operator(R, l, N);
      for (int k = 1; k <= N; ++k) {
        if (k == l) continue;
        const Matrix Vkl = first_quantization::pair_operator(V, k, l, N, d);
        acc += Vkl * JR - JR * Vkl;
      }
      mf += first_quantization::slot_operator(WR, l, N);
    }
    const Matrix full_op = acc / n2 - mf / static_cast<double>(N);
    in = first_quantization::compress(full_op, *ctx.basis, first_quantization_cap);
  }
  return conjugate(ctx.U, SymOperator(ctx.basis, in));
}

SymOperator TermDecomposition::sum() const {
  SymOperator s = T[0];
  for (std::size_t j = 1; j < T.size(); ++j) s += T[j];
  return s;
}

TermDecomposition build_terms(const FourierModes& modes, const SampleContext& ctx) {
  const BasisPtr& b = ctx.basis;
  const auto D = static_cast<Eigen::Index>(b->size());
  const int N = b->particles();
  const Matrix& R = ctx.pair.R.matrix();
  const Matrix& P = ctx.pair.P.matrix();
  const Matrix Wm = diag(ctx.W);

  Matrix S1 = Matrix::Zero(D, D);
  Matrix S3 = Matrix::Zero(D, D);
  for (int k = 0; k < modes.size(); ++k) {
    const double vh = modes.vhat()(k);
    if (vh == 0.0) continue;
    const Matrix& E = modes.E(k).matrix();
    const Matrix Es = E.adjoint();
    const Matrix mPER = lift(P * E * R, b);
    S1 += vh * lift(P * Es * P, b) * mPER;
    S3 += vh * lift(P * Es * R, b) * mPER;
  }
  S1 /= static_cast<double>(modes.size());
  S3 /= static_cast<double>(modes.size());
  const Matrix S2 = lift(P, b) * lift(P * Wm * R, b);

  TermDecomposition dec;
  dec.t = ctx.t;
  dec.T.push_back(conjugate(ctx.U, SymOperator(b, S1 - S1.adjoint())));
  dec.T.push_back(conjugate(ctx.U, SymOperator(b, S2.adjoint() - S2)));
  dec.T.push_back(conjugate(ctx.U, SymOperator(b, S3 - S3.adjoint())));
  dec.T.push_back(conjugate(ctx.U, SymOperator(b, mean_field_piece(ctx) / static_cast<double>(N))));
  return dec;
}

double skew_drift(const SymOperator& X) {
  const double scale = X.matrix().cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (X.matrix() + X.matrix().adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace {

// iX made exactly Hermitian; X is skew-adjoint up to rounding
Matrix i_times(const SymOperator& X) {
  const Matrix H = I_unit * X.matrix();
  return 0.5 * (H + H.adjoint());
}

MarginPair pm_margins(const SymOperator& X, const Matrix& rhs) {
  const Matrix H = i_times(X);
  return {matrix_inequality_margin(H, rhs), matrix_inequality_margin(-H, rhs)};
}

}  // namespace

TermBoundMargins verify_term_bounds(const TermDecomposition& dec, double ell, const SymOperator& MP, int N) {
  const Matrix mp = 0.5 * (MP.matrix() + MP.matrix().adjoint());
  const auto D = mp.rows();
  const Matrix I = Matrix::Identity(D, D);
  const double n = N;
  const double c = 1.0 - 1.0 / n;
  const Matrix rhs[4] = {
      2.0 * ell * (c * mp + (4.0 / n) * I),
      2.0 * ell * (mp + (1.0 / n) * I),
      2.0 * ell * (c * mp + (1.0 / n) * I),
      (2.0 / n) * ell * I,
  };
  TermBoundMargins out;
  for (int j = 0; j < 4; ++j) {
    const MarginPair m = pm_margins(dec.T[j], rhs[j]);
    out.plus[j] = m.plus;
    out.minus[j] = m.minus;
  }
  const MarginPair tight = pm_margins(dec.T[0], 2.0 * ell * (c * mp + (2.0 / n) * I));
  out.t1_tight_plus = tight.plus;
  out.t1_tight_minus = tight.minus;
  return out;
}

MarginPair verify_aggregate(const SymOperator& C, double rate, const SymOperator& MP, int N) {
  const Matrix mp = 0.5 * (MP.matrix() + MP.matrix().adjoint());
  const Matrix rhs = 6.0 * rate * (mp + (2.0 / N) * Matrix::Identity(mp.rows(), mp.cols()));
  return pm_margins(C, rhs);
}

DerivativeCheck derivative_identity_check(const NBodyPropagator& prop, const GridGeometry& g, const PairPotential& v,
                                          const FourierModes& modes, const Vector& psi_t, double t, double dt_fd,
                                          double integrator_dt) {
  if (!(dt_fd > 0.0) || !(integrator_dt > 0.0)) throw Error("derivative check: step sizes must be positive");
  const double r = dt_fd >= integrator_dt ? dt_fd / integrator_dt : integrator_dt / dt_fd;
  if (std::abs(r - std::round(r)) > 1e-9 * r)
    throw Error("derivative check: dt_fd=" + std::to_string(dt_fd) + " is not aligned with integrator step " +
                std::to_string(integrator_dt));
  const int sub = dt_fd > integrator_dt ? static_cast<int>(std::lround(r)) : 1;
  const double h = dt_fd / sub;

  Vector plus = psi_t, minus = psi_t;
  for (int s = 0; s < sub; ++s) {
    plus = rk4_step(plus, h, g, v);
    minus = rk4_step(minus, -h, g, v);
  }
  auto heis_p = [&](const Vector& psi, double time) {
    // renormalize only to satisfy the projector precondition; drift is O(h^5)
    const Vector p = psi / g.norm(psi);
    return prop.heisenberg_lift(projector_pair(p, g).P, time).matrix();
  };
  const Matrix fd = (I_unit * g.hbar() / (2.0 * dt_fd)) * (heis_p(plus, t + dt_fd) - heis_p(minus, t - dt_fd));

  const SymOperator C = c_operator_fourier(modes, make_context(prop, g, v, psi_t, t));
  DerivativeCheck out;
  out.fd_norm = op_norm(fd);
  out.c_norm = op_norm(C.matrix());
  const double diff = op_norm(fd - C.matrix());
  out.relative = out.c_norm >= derivative_absolute_floor;
  out.residual = out.relative ? diff / out.c_norm : diff;
  return out;
}

namespace {

Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = cplx(n(rng), n(rng));
  return A;
}

double rel(const Matrix& a, const Matrix& b) {
  const double s = std::max(op_norm(b), 1e-300);
  return op_norm(a - b) / s;
}

}  // namespace

MorphismSuiteResult morphism_suite(const NBodyPropagator& prop, double tmax, int instances, std::uint64_t seed,
                                   double tol) {
  const BasisPtr& basis = prop.basis();
  const int d = basis->modes();
  const double N = basis->particles();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, tmax);
  MorphismSuiteResult r;
  r.instances = instances;
  const auto D = static_cast<Eigen::Index>(basis->size());
  for (int i = 0; i < instances; ++i) {
    const double t = unif(rng);
    const Matrix U = prop.unitary(t);
    auto M = [&](const Matrix& A) -> Matrix { return U.adjoint() * lift(A, basis) * U; };
    const Matrix A = random_matrix(d, rng);
    const Matrix B = random_matrix(d, rng);
    const Matrix H = 0.5 * (A + A.adjoint());

    const Matrix MA = M(A), MB = M(B);
    const double excess = op_norm(M(H)) - op_norm(H);
    r.worst_contraction = std::max(r.worst_contraction, excess);
    if (excess > tol * op_norm(H)) ++r.contraction_failures;

    const double c = rel(MA * MB - MB * MA, M(A * B - B * A) / N);
    r.worst_commutator = std::max(r.worst_commutator, c);
    if (c > tol) ++r.commutator_failures;

    const double a = rel(M(A.adjoint()), MA.adjoint());
    r.worst_adjoint = std::max(r.worst_adjoint, a);
    if (a > tol) ++r.adjoint_failures;

    const double id = op_norm(M(Matrix::Identity(d, d)) - Matrix::Identity(D, D));
    r.worst_identity = std::max(r.worst_identity, id);
    if (id > tol) ++r.identity_failures;
  }
  return r;
}

}  // namespace picklab
