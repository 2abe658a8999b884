#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "cvqkd/channel.hpp"
#include "cvqkd/covariance.hpp"
#include "cvqkd/entropy.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/purifier.hpp"
#include "cvqkd/state_builder.hpp"

namespace cvqkd {

enum class Detection { homodyne, heterodyne };

/// Bob-side measurement scenario. measured_quadrature applies to homodyne
/// only; reconciliation_efficiency multiplies I_AB (1 = perfect
/// post-processing).
struct ProtocolConfig {
  Detection detection = Detection::homodyne;
  Quadrature measured_quadrature = Quadrature::x;
  LogBase log_base = LogBase::two;
  double reconciliation_efficiency = 1.0;
};

inline void validate(const ProtocolConfig& cfg) {
  if (!(cfg.reconciliation_efficiency > 0.0 && cfg.reconciliation_efficiency <= 1.0))
    throw InvalidParameter("beta must lie in (0,1], got " +
                           std::to_string(cfg.reconciliation_efficiency));
}

struct HolevoBound {
  double S_E = 0.0;
  double S_E_given_B = 0.0;
  double chi_BE = 0.0;
};

/// Full evaluation of one scenario.
struct KeyRateReport {
  double I_AB = 0.0;
  double S_E = 0.0;
  double S_E_given_B = 0.0;
  double chi_BE = 0.0;
  double K = 0.0;
  PurificationParams purification;
  ChannelParams channel;
};

/// I_AB = (1/2) log(1 + C'^2 / (V_B' V_M - C'^2)) in the measured quadrature.
inline double mutual_information_homodyne(const PostChannelStats& post, Quadrature quadrature,
                                          LogBase base = LogBase::two) {
  const bool x = quadrature == Quadrature::x;
  const double v_b = x ? post.V_Bp_x : post.V_Bp_p;
  const double v_m = x ? post.V_M_x : post.V_M_p;
  const double c = x ? post.C_MBp_x : post.C_MBp_p;
  const double denom = v_b * v_m - c * c;
  if (!(denom > 0.0))
    throw InvalidStatistics("super-physical correlations: V_B'*V_M - C'^2 = " +
                            std::to_string(denom) + " <= 0");
  return 0.5 * log_in_base(1.0 + c * c / denom, base);
}

/// I_AB = (1/2) log prod_q (1 + C_q'^2 / ((V_B_q'+1) V_M_q - C_q'^2)); the +1
/// is the vacuum penalty of measuring both quadratures at once.
inline double mutual_information_heterodyne(const PostChannelStats& post,
                                            LogBase base = LogBase::two) {
  double product = 1.0;
  const double v_b[2] = {post.V_Bp_x, post.V_Bp_p};
  const double v_m[2] = {post.V_M_x, post.V_M_p};
  const double c[2] = {post.C_MBp_x, post.C_MBp_p};
  for (int q = 0; q < 2; ++q) {
    const double denom = (v_b[q] + 1.0) * v_m[q] - c[q] * c[q];
    if (!(denom > 0.0))
      throw InvalidStatistics("super-physical correlations: (V_B'+1)*V_M - C'^2 = " +
                              std::to_string(denom) + " <= 0");
    product *= 1.0 + c[q] * c[q] / denom;
  }
  return 0.5 * log_in_base(product, base);
}

inline constexpr double kHolevoFloorTolerance = 1e-9;

namespace detail {

/// chi values in [-1e-9, 0) are roundoff; anything lower is a bug.
inline double floor_chi(double chi) {
  if (chi < -kHolevoFloorTolerance)
    throw NumericalFailure("Holevo bound came out negative: " + std::to_string(chi));
  return std::max(chi, 0.0);
}

}  // namespace detail

/// Eavesdropper information bound under collective attacks in reverse
/// reconciliation: purify the pre-channel state, send mode B through the
/// channel, and take S(ABCD) - S(ACD|B) with B conditioned on Bob's
/// measurement.
inline HolevoBound holevo_bound(const TwoModeState& state_pre, const ChannelParams& ch,
                                const ProtocolConfig& cfg) {
  validate(cfg);
  const PurifiedState purified = purify(state_pre);
  const CovarianceMatrix after = apply_channel(purified.gamma_abcd, kModeB, ch);

  HolevoBound bound;
  bound.S_E = von_neumann_entropy(after, cfg.log_base);
  const CovarianceMatrix conditioned =
      cfg.detection == Detection::homodyne
          ? condition_on_homodyne(after, kModeB, cfg.measured_quadrature)
          : condition_on_heterodyne(after, kModeB);
  bound.S_E_given_B = von_neumann_entropy(conditioned, cfg.log_base);
  bound.chi_BE = detail::floor_chi(bound.S_E - bound.S_E_given_B);
  return bound;
}

/// Asymptotic secure-key-rate lower bound K = max{0, beta*I_AB - chi_BE}.
inline KeyRateReport key_rate(const MeasuredPreparationStats& stats, const ChannelParams& ch,
                              const ProtocolConfig& cfg) {
  validate(cfg);
  const PostChannelStats post = transform_stats(stats, ch);
  const double i_ab = cfg.detection == Detection::homodyne
                          ? mutual_information_homodyne(post, cfg.measured_quadrature, cfg.log_base)
                          : mutual_information_heterodyne(post, cfg.log_base);

  const TwoModeState state = build_equivalent_state(stats);
  const PurificationParams params = solve_purification(state);
  const HolevoBound bound = holevo_bound(state, ch, cfg);

  KeyRateReport report;
  report.I_AB = i_ab;
  report.S_E = bound.S_E;
  report.S_E_given_B = bound.S_E_given_B;
  report.chi_BE = bound.chi_BE;
  report.K = std::max(0.0, cfg.reconciliation_efficiency * i_ab - bound.chi_BE);
  report.purification = params;
  report.channel = ch;
  return report;
}

}  // namespace cvqkd
