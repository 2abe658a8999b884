#pragma once

#include <cmath>
#include <string>

#include "cvqkd/covariance.hpp"
#include "cvqkd/errors.hpp"

namespace cvqkd {

/// Logarithm base of all entropies and informations: bits or nats.
enum class LogBase { two, e };

inline double log_in_base(double v, LogBase base) {
  return base == LogBase::two ? std::log2(v) : std::log(v);
}

inline constexpr double kEigenvalueClampTolerance = 1e-6;

/// Entropy of a thermal mode of symplectic eigenvalue nu:
/// g(nu) = ((nu+1)/2) log((nu+1)/2) - ((nu-1)/2) log((nu-1)/2), g(1) = 0.
///
/// Eigenvalues in [1 - 1e-6, 1) are clamped to 1 (roundoff on pure states);
/// anything lower is rejected as unphysical.
inline double entropy_g(double nu, LogBase base = LogBase::two) {
  if (nu < 1.0 - kEigenvalueClampTolerance)
    throw UnphysicalState("symplectic eigenvalue " + std::to_string(nu) + " < 1");
  if (nu <= 1.0) return 0.0;
  const double a = 0.5 * (nu + 1.0);
  const double b = 0.5 * (nu - 1.0);
  return a * log_in_base(a, base) - b * log_in_base(b, base);
}

/// Von Neumann entropy of a Gaussian state, summed over the symplectic
/// spectrum.
inline double von_neumann_entropy(const CovarianceMatrix& gamma, LogBase base = LogBase::two) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(gamma).eigenvalues) s += entropy_g(nu, base);
  return s;
}

}  // namespace cvqkd
