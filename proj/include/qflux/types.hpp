#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace qflux {

using Real = double;
using Complex = std::complex<Real>;

using ArrayXr = Eigen::ArrayXd;
using ArrayXc = Eigen::ArrayXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Real pi = std::numbers::pi_v<Real>;

/// An internal consistency check tripped (imaginary residue, aliasing guard,
/// failed inversion). Distinct from domain/usage errors so callers can map it
/// to a dedicated exit code.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qflux
