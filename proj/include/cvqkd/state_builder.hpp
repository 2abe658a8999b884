#pragma once

#include <cmath>
#include <string>

#include "cvqkd/covariance.hpp"
#include "cvqkd/errors.hpp"

namespace cvqkd {

/// Per-quadrature statistics of the prepare-and-measure scheme: Alice's
/// modulation data variance V_M, the signal variance entering the channel
/// V_B, and their covariance C_MB. All in shot-noise units.
struct MeasuredPreparationStats {
  double V_M_x = 0.0;
  double V_M_p = 0.0;
  double V_B_x = 0.0;
  double V_B_p = 0.0;
  double C_MB_x = 0.0;
  double C_MB_p = 0.0;
};

/// V_M > 0, V_B >= 1 (coherent-state protocol; sub-shot-noise signal is out
/// of scope here) and the Cauchy-Schwarz bound C_MB^2 <= V_M * V_B. Full
/// physicality is checked later by the purifier.
inline void validate(const MeasuredPreparationStats& stats) {
  struct Quad {
    const char* name;
    double vm, vb, c;
  };
  const Quad quads[2] = {{"x", stats.V_M_x, stats.V_B_x, stats.C_MB_x},
                         {"p", stats.V_M_p, stats.V_B_p, stats.C_MB_p}};
  for (const auto& q : quads) {
    if (!(q.vm > 0.0))
      throw InvalidParameter(std::string("V_M_") + q.name + " must be positive, got " +
                             std::to_string(q.vm));
    if (!(q.vb >= 1.0))
      throw InvalidParameter(std::string("V_B_") + q.name + " must be >= 1 (shot noise), got " +
                             std::to_string(q.vb));
    if (!(q.c * q.c <= q.vm * q.vb))
      throw InvalidParameter(std::string("C_MB_") + q.name +
                             " violates the Cauchy-Schwarz bound C^2 <= V_M*V_B");
    if (!std::isfinite(q.vm) || !std::isfinite(q.vb) || !std::isfinite(q.c))
      throw InvalidParameter("preparation statistics must be finite");
  }
}

/// Symmetrized entanglement-based two-mode state with the x/p block-diagonal
/// layout: per quadrature, diag entries V_B on both modes and off-diagonal
/// correlation C_AB; no x-p cross terms.
class TwoModeState {
 public:
  TwoModeState(double v_x, double v_p, double c_x, double c_p)
      : gamma_(assemble(v_x, v_p, c_x, c_p)) {}

  double V_B_x() const { return gamma_(0, 0); }
  double V_B_p() const { return gamma_(1, 1); }
  double C_AB_x() const { return gamma_(0, 2); }
  double C_AB_p() const { return gamma_(1, 3); }
  const CovarianceMatrix& gamma() const { return gamma_; }

 private:
  static CovarianceMatrix assemble(double v_x, double v_p, double c_x, double c_p) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = m(2, 2) = v_x;
    m(1, 1) = m(3, 3) = v_p;
    m(0, 2) = m(2, 0) = c_x;
    m(1, 3) = m(3, 1) = c_p;
    return CovarianceMatrix(m);
  }

  CovarianceMatrix gamma_;
};

/// Equivalent two-mode state of the measured preparation: per quadrature,
/// V_A = V_B and C_AB = C_MB * sqrt((1 + V_B) / V_M).
inline TwoModeState build_equivalent_state(const MeasuredPreparationStats& stats) {
  validate(stats);
  const double c_x = stats.C_MB_x * std::sqrt((1.0 + stats.V_B_x) / stats.V_M_x);
  const double c_p = stats.C_MB_p * std::sqrt((1.0 + stats.V_B_p) / stats.V_M_p);
  return TwoModeState(stats.V_B_x, stats.V_B_p, c_x, c_p);
}

/// True iff C_MB^2 / V_M = C_AB^2 / (V_A + 1) holds in both quadratures
/// (the prepare-and-measure / entanglement-based equivalence condition).
inline bool check_equivalence_ratio(const MeasuredPreparationStats& stats,
                                    const TwoModeState& state, double rel_tol = 1e-10) {
  const auto matches = [rel_tol](double c_mb, double v_m, double c_ab, double v_a) {
    const double lhs = c_mb * c_mb / v_m;
    const double rhs = c_ab * c_ab / (v_a + 1.0);
    return std::abs(lhs - rhs) <= rel_tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  };
  return matches(stats.C_MB_x, stats.V_M_x, state.C_AB_x(), state.V_B_x()) &&
         matches(stats.C_MB_p, stats.V_M_p, state.C_AB_p(), state.V_B_p());
}

}  // namespace cvqkd
