#pragma once

#include <cmath>
#include <string>

#include "cvqkd/covariance.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/state_builder.hpp"

namespace cvqkd {

/// Mode indices of the purified four-mode state.
inline constexpr int kModeA = 0;
inline constexpr int kModeB = 1;
inline constexpr int kModeC = 2;
inline constexpr int kModeD = 3;

/// Parameters of the four-mode purification network: two EPR sources of
/// variances V1, V2, two single-mode squeezers s1, s2, and two couplers
/// fixed at T1 = 1 (compiled away) and T2 = 1/2.
struct PurificationParams {
  double V1 = 1.0;
  double V2 = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double T1 = 1.0;
  double T2 = 0.5;
};

/// Pure four-mode state (A,B,C,D) whose A,B submatrix is the purified input.
struct PurifiedState {
  CovarianceMatrix gamma_abcd;
  PurificationParams params;
};

inline constexpr double kAncillaVarianceTolerance = 1e-9;
inline constexpr double kPurityTolerance = 1e-7;
inline constexpr double kReconstructionTolerance = 1e-9;

/// Analytic network parameters for a given two-mode state:
///   V1 = sqrt((V_B_x - C_x)(V_B_p - C_p)),  s1 = (1/4) ln((V_B_p - C_p)/(V_B_x - C_x))
///   V2 = sqrt((V_B_x + C_x)(V_B_p + C_p)),  s2 = (1/4) ln((V_B_p + C_p)/(V_B_x + C_x))
/// Ancilla variances in [1 - 1e-9, 1) clamp to 1.
inline PurificationParams solve_purification(const TwoModeState& state) {
  const double d_x = state.V_B_x() - state.C_AB_x();
  const double d_p = state.V_B_p() - state.C_AB_p();
  const double s_x = state.V_B_x() + state.C_AB_x();
  const double s_p = state.V_B_p() + state.C_AB_p();
  // a nonpositive factor means |C_AB| >= V_B in some quadrature, i.e. the
  // input matrix is not a positive-definite covariance matrix
  if (!(d_x > 0.0 && d_p > 0.0))
    throw UnphysicalState("no purification network exists: (V_B - C_AB) product is nonpositive");
  if (!(s_x > 0.0 && s_p > 0.0))
    throw UnphysicalState("no purification network exists: (V_B + C_AB) product is nonpositive");

  PurificationParams params;
  params.V1 = std::sqrt(d_x * d_p);
  params.V2 = std::sqrt(s_x * s_p);
  params.s1 = 0.25 * std::log(d_p / d_x);
  params.s2 = 0.25 * std::log(s_p / s_x);
  for (double* v : {&params.V1, &params.V2}) {
    if (*v < 1.0 - kAncillaVarianceTolerance)
      throw UnphysicalState("input state violates the uncertainty relation: ancilla variance " +
                            std::to_string(*v) + " < 1");
    if (*v < 1.0) *v = 1.0;  // pure ancilla up to roundoff
  }
  return params;
}

/// Assembles the network output state: EPR(V1) on (B-arm, C) and EPR(V2) on
/// (A-arm, D), squeezers s1/s2 on the respective arms, then the balanced
/// coupler across the arms. Output variances obey
///   V_B_q  = (w2_q + w1_q)/2,  C_AB_q = (w2_q - w1_q)/2
/// with w1 = (e^-2s1 V1, e^+2s1 V1), w2 likewise for the A-arm.
inline CovarianceMatrix synthesize_network(const PurificationParams& params) {
  if (!(params.T1 == 1.0 && params.T2 == 0.5))
    throw InvalidParameter("network couplers are fixed at T1 = 1, T2 = 1/2");
  if (!(params.V1 >= 1.0) || !(params.V2 >= 1.0))
    throw UnphysicalParameter("EPR source variances must satisfy V >= 1");

  const int dim = 8;
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(dim, dim);
  const auto place_epr = [&gamma](double v, int first, int second) {
    const Eigen::Matrix4d epr = epr_state(v).matrix().block<4, 4>(0, 0);
    const int modes[2] = {first, second};
    for (int bi = 0; bi < 2; ++bi)
      for (int bj = 0; bj < 2; ++bj)
        gamma.block<2, 2>(2 * modes[bi], 2 * modes[bj]) = epr.block<2, 2>(2 * bi, 2 * bj);
  };
  place_epr(params.V2, kModeA, kModeD);  // A-arm purified by D
  place_epr(params.V1, kModeB, kModeC);  // B-arm purified by C

  CovarianceMatrix state(gamma);
  state = apply(squeezer(params.s2), state, {kModeA});
  state = apply(squeezer(params.s1), state, {kModeB});
  // T1 = 1 coupler is the identity; the balanced coupler mixes the arms so
  // that port A carries +w2, port B carries -w1 contributions
  state = apply(beamsplitter(params.T2), state, {kModeA, kModeB});
  return state;
}

/// Solve and synthesize, then verify purity and that the (A,B) submatrix
/// reproduces the input.
inline PurifiedState purify(const TwoModeState& state) {
  const PurificationParams params = solve_purification(state);
  CovarianceMatrix gamma = synthesize_network(params);

  const double purity_residual = symplectic_eigenvalues(gamma).max_deviation_from_pure();
  if (purity_residual > kPurityTolerance)
    throw NumericalFailure("purified state is not pure: max |nu - 1| = " +
                           std::to_string(purity_residual));

  const Eigen::Matrix4d ab = gamma.matrix().block<4, 4>(0, 0);
  const double mismatch = (ab - state.gamma().matrix()).cwiseAbs().maxCoeff();
  if (mismatch > kReconstructionTolerance)
    throw ReconstructionMismatch("purified A,B submatrix deviates from the input by " +
                                 std::to_string(mismatch));

  return PurifiedState{std::move(gamma), params};
}

}  // namespace cvqkd
