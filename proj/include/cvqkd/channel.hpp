#pragma once

#include <cmath>
#include <string>

#include "cvqkd/covariance.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/state_builder.hpp"

namespace cvqkd {

/// Lossy/noisy Gaussian channel: transmittance eta in (0,1] and excess noise
/// epsilon referred to the channel input (output noise contribution is
/// eta * epsilon).
struct ChannelParams {
  double eta = 1.0;
  double epsilon = 0.0;
};

inline void validate(const ChannelParams& ch) {
  if (!(ch.eta > 0.0 && ch.eta <= 1.0))
    throw InvalidParameter("eta must lie in (0,1], got " + std::to_string(ch.eta));
  if (!(ch.epsilon >= 0.0) || !std::isfinite(ch.epsilon))
    throw InvalidParameter("epsilon must be >= 0, got " + std::to_string(ch.epsilon));
}

/// Statistics as measured behind the channel; V_M passes through unchanged.
struct PostChannelStats {
  double V_Bp_x = 0.0;
  double V_Bp_p = 0.0;
  double C_MBp_x = 0.0;
  double C_MBp_p = 0.0;
  double V_M_x = 0.0;
  double V_M_p = 0.0;
};

/// Attenuation in dB to transmittance: 10^(-dB/10).
inline double db_to_transmittance(double attenuation_db) {
  if (!(attenuation_db >= 0.0))
    throw InvalidParameter("attenuation must be >= 0 dB, got " + std::to_string(attenuation_db));
  return std::pow(10.0, -attenuation_db / 10.0);
}

/// Channel action on one mode of a multimode state: the mode's own block
/// becomes eta*(block + epsilon*I) + (1-eta)*I, its cross blocks scale by
/// sqrt(eta), everything else is untouched (bit-exact for eta=1, epsilon=0).
inline CovarianceMatrix apply_channel(const CovarianceMatrix& gamma, int mode,
                                      const ChannelParams& ch) {
  validate(ch);
  gamma.check_mode(mode);
  if (ch.eta == 1.0 && ch.epsilon == 0.0) return gamma;
  Eigen::MatrixXd out = gamma.matrix();
  const int dim = 2 * gamma.n_modes();
  const double root_eta = std::sqrt(ch.eta);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const bool row_in = i / 2 == mode;
      const bool col_in = j / 2 == mode;
      if (row_in && col_in) {
        out(i, j) = ch.eta * out(i, j);
        if (i == j) out(i, j) += ch.eta * ch.epsilon + (1.0 - ch.eta);
      } else if (row_in || col_in) {
        out(i, j) *= root_eta;
      }
    }
  }
  return CovarianceMatrix(std::move(out));
}

/// Forward model of the channel on the scalar statistics:
/// V_B' = eta*(V_B + epsilon) + (1 - eta),  C_MB' = sqrt(eta)*C_MB.
inline PostChannelStats transform_stats(const MeasuredPreparationStats& stats,
                                        const ChannelParams& ch) {
  validate(stats);
  validate(ch);
  const double root_eta = std::sqrt(ch.eta);
  PostChannelStats post;
  post.V_Bp_x = ch.eta * (stats.V_B_x + ch.epsilon) + (1.0 - ch.eta);
  post.V_Bp_p = ch.eta * (stats.V_B_p + ch.epsilon) + (1.0 - ch.eta);
  post.C_MBp_x = root_eta * stats.C_MB_x;
  post.C_MBp_p = root_eta * stats.C_MB_p;
  post.V_M_x = stats.V_M_x;
  post.V_M_p = stats.V_M_p;
  return post;
}

/// Exact inverse of transform_stats. Throws InconsistentEstimate when the
/// reconstructed signal variance drops below shot noise.
inline MeasuredPreparationStats reconstruct_pre_channel(const PostChannelStats& post,
                                                        const ChannelParams& ch) {
  validate(ch);
  const double root_eta = std::sqrt(ch.eta);
  MeasuredPreparationStats stats;
  stats.V_B_x = (post.V_Bp_x - (1.0 - ch.eta)) / ch.eta - ch.epsilon;
  stats.V_B_p = (post.V_Bp_p - (1.0 - ch.eta)) / ch.eta - ch.epsilon;
  stats.C_MB_x = post.C_MBp_x / root_eta;
  stats.C_MB_p = post.C_MBp_p / root_eta;
  stats.V_M_x = post.V_M_x;
  stats.V_M_p = post.V_M_p;
  for (double v : {stats.V_B_x, stats.V_B_p})
    if (!(v >= 1.0))
      throw InconsistentEstimate(
          "channel parameters are inconsistent with the data: reconstructed V_B = " +
          std::to_string(v) + " < 1");
  return stats;
}

}  // namespace cvqkd
