#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/estimation.hpp"

namespace cvqkd {

/// Deterministic Gaussian source: seeded mt19937_64 plus an explicit
/// Box-Muller transform, so equal seeds give identical streams on every
/// platform (std::normal_distribution would not).
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool coin() { return (rng_() & 1u) != 0; }

 private:
  double uniform_open() {
    // 53-bit mantissa shifted into (0,1), never exactly 0 or 1
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

namespace detail {

/// Draws (m, b) with Var(m)=v_m, Var(b)=v_b, Cov(m,b)=c.
struct PairedGaussian {
  PairedGaussian(double v_m, double v_b, double c) : scale_m(std::sqrt(v_m)), slope(c / v_m) {
    const double residual = v_b - c * c / v_m;
    if (!(v_m > 0.0) || !(residual >= 0.0))
      throw InvalidParameter("sampling model needs V_M > 0 and C'^2 <= V_M*V_B'");
    noise = std::sqrt(residual);
  }

  std::pair<double, double> draw(GaussianSampler& sampler) const {
    const double m = scale_m * sampler.standard_normal();
    const double b = slope * m + noise * sampler.standard_normal();
    return {m, b};
  }

  double scale_m, slope, noise = 0.0;
};

}  // namespace detail

/// Synthetic heterodyne records drawn from the post-channel statistics.
inline std::vector<HeterodyneSample> synthesize_heterodyne_samples(const PostChannelStats& post,
                                                                   std::size_t count,
                                                                   std::uint64_t seed) {
  const detail::PairedGaussian model_x(post.V_M_x, post.V_Bp_x, post.C_MBp_x);
  const detail::PairedGaussian model_p(post.V_M_p, post.V_Bp_p, post.C_MBp_p);
  GaussianSampler sampler(seed);
  std::vector<HeterodyneSample> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto [m_x, b_x] = model_x.draw(sampler);
    const auto [m_p, b_p] = model_p.draw(sampler);
    samples.push_back({m_x, m_p, b_x, b_p});
  }
  return samples;
}

/// Synthetic homodyne records; the basis is a fair coin per record and the
/// unmeasured quadrature's modulation is an independent draw.
inline std::vector<HomodyneSample> synthesize_homodyne_samples(const PostChannelStats& post,
                                                               std::size_t count,
                                                               std::uint64_t seed) {
  const detail::PairedGaussian model_x(post.V_M_x, post.V_Bp_x, post.C_MBp_x);
  const detail::PairedGaussian model_p(post.V_M_p, post.V_Bp_p, post.C_MBp_p);
  GaussianSampler sampler(seed);
  std::vector<HomodyneSample> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    HomodyneSample s;
    s.basis = sampler.coin() ? Quadrature::p : Quadrature::x;
    if (s.basis == Quadrature::x) {
      const auto [m, b] = model_x.draw(sampler);
      s.m_x = m;
      s.b = b;
      s.m_p = std::sqrt(post.V_M_p) * sampler.standard_normal();
    } else {
      const auto [m, b] = model_p.draw(sampler);
      s.m_p = m;
      s.b = b;
      s.m_x = std::sqrt(post.V_M_x) * sampler.standard_normal();
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace cvqkd
