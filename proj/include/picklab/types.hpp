#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace picklab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bosonic sector dimension exceeds the configured cap.
class SectorTooLarge : public Error {
 public:
  SectorTooLarge(int N, int d, std::size_t dim, std::size_t cap)
      : Error("sector too large: N=" + std::to_string(N) + ", d=" + std::to_string(d) +
              " gives D=" + std::to_string(dim) + " > cap " + std::to_string(cap)),
        N_(N) {}
  int particles() const { return N_; }

 private:
  int N_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace picklab
