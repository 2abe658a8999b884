#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cvqkd/keyrate.hpp"
#include "cvqkd/sweep.hpp"
#include "test_support.hpp"

using namespace cvqkd;
using Catch::Approx;

namespace {

MeasuredPreparationStats study_stats(double v_b_x = 10.0, double v_b_p = 10.0) {
  MeasuredPreparationStats s;
  s.V_M_x = s.V_M_p = 9.0;
  s.C_MB_x = 9.0;
  s.C_MB_p = -9.0;
  s.V_B_x = v_b_x;
  s.V_B_p = v_b_p;
  return s;
}

PostChannelStats identity_post(double v_b = 10.0) {
  return transform_stats(study_stats(v_b, v_b), ChannelParams{1.0, 0.0});
}

ProtocolConfig homodyne_cfg(Quadrature q = Quadrature::x) {
  ProtocolConfig cfg;
  cfg.detection = Detection::homodyne;
  cfg.measured_quadrature = q;
  return cfg;
}

ProtocolConfig heterodyne_cfg() {
  ProtocolConfig cfg;
  cfg.detection = Detection::heterodyne;
  return cfg;
}

}  // namespace

TEST_CASE("mutual information closed forms", "[keyrate]") {
  SECTION("no correlations, no information") {
    PostChannelStats post = identity_post();
    post.C_MBp_x = post.C_MBp_p = 0.0;
    REQUIRE(mutual_information_homodyne(post, Quadrature::x) == 0.0);
    REQUIRE(mutual_information_heterodyne(post) == 0.0);
  }
  SECTION("study scenario at the identity channel") {
    const auto post = identity_post();
    // (1/2) log2(1 + 81/(90-81)) = (1/2) log2(10)
    REQUIRE(mutual_information_homodyne(post, Quadrature::x) ==
            Approx(1.6609640474436812).margin(1e-12));
    REQUIRE(mutual_information_homodyne(post, Quadrature::p) ==
            Approx(1.6609640474436812).margin(1e-12));
    // (1/2) log2((1 + 81/18)^2) = log2(5.5)
    REQUIRE(mutual_information_heterodyne(post) == Approx(2.4594316186372973).margin(1e-12));
  }
  SECTION("homodyne matches the Schur-complement identity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto stats = cvqkd::testing::random_stats(rng);
      const auto post = transform_stats(stats, {0.1 + 0.9 * unif(rng), 0.1 * unif(rng)});
      if (!(post.V_Bp_x * post.V_M_x - post.C_MBp_x * post.C_MBp_x > 0.0)) continue;
      const double direct = mutual_information_homodyne(post, Quadrature::x);
      const double conditional =
          0.5 * std::log2(post.V_M_x /
                          (post.V_M_x - post.C_MBp_x * post.C_MBp_x / post.V_Bp_x));
      REQUIRE(direct == Approx(conditional).margin(1e-12));
    }
  }
  SECTION("heterodyne is invariant under correlation sign flips") {
    auto post = identity_post();
    const double reference = mutual_information_heterodyne(post);
    post.C_MBp_x = -post.C_MBp_x;
    REQUIRE(mutual_information_heterodyne(post) == reference);
  }
  SECTION("super-physical correlations are rejected") {
    auto post = identity_post();
    post.C_MBp_x = 100.0;
    REQUIRE_THROWS_AS(mutual_information_homodyne(post, Quadrature::x), InvalidStatistics);
    REQUIRE_THROWS_AS(mutual_information_heterodyne(post), InvalidStatistics);
  }
}

TEST_CASE("holevo_bound", "[keyrate]") {
  SECTION("identity channel on pure preparation leaks nothing") {
    const auto state = build_equivalent_state(study_stats());
    for (const auto& cfg : {homodyne_cfg(), heterodyne_cfg()}) {
      const auto bound = holevo_bound(state, ChannelParams{1.0, 0.0}, cfg);
      REQUIRE(bound.S_E == Approx(0.0).margin(1e-9));
      REQUIRE(bound.chi_BE == Approx(0.0).margin(1e-8));
    }
  }
  SECTION("frozen regression at the identity-loss noisy channel") {
    // reference values from tests/oracle/holevo_oracle.py (50-digit pipeline)
    const auto state = build_equivalent_state(study_stats());
    const ChannelParams ch{1.0, 0.07};
    const auto hom = holevo_bound(state, ch, homodyne_cfg());
    REQUIRE(hom.S_E == Approx(1.2949480387183802).margin(1e-9));
    REQUIRE(hom.S_E_given_B == Approx(0.64139601963049812).margin(1e-9));
    REQUIRE(hom.chi_BE == Approx(0.65355201908788208).margin(1e-9));
    const auto het = holevo_bound(state, ch, heterodyne_cfg());
    REQUIRE(het.chi_BE == Approx(1.1071946987598264).margin(1e-9));
  }
  SECTION("nats scale by ln 2") {
    const auto state = build_equivalent_state(study_stats());
    auto cfg_bits = heterodyne_cfg();
    auto cfg_nats = heterodyne_cfg();
    cfg_nats.log_base = LogBase::e;
    const auto bits = holevo_bound(state, ChannelParams{0.5, 0.07}, cfg_bits);
    const auto nats = holevo_bound(state, ChannelParams{0.5, 0.07}, cfg_nats);
    REQUIRE(nats.chi_BE == Approx(bits.chi_BE * std::log(2.0)).margin(1e-10));
  }
}

TEST_CASE("key_rate composition", "[keyrate]") {
  SECTION("identity channel: K equals I_AB") {
    const auto report = key_rate(study_stats(), ChannelParams{1.0, 0.0}, homodyne_cfg());
    REQUIRE(report.chi_BE <= 1e-8);
    REQUIRE(report.K == Approx(1.6609640474436812).margin(1e-8));
    REQUIRE(report.purification.V1 == Approx(1.0).margin(1e-9));
  }
  SECTION("deep attenuation with noise clamps to zero") {
    const auto report = key_rate(study_stats(), ChannelParams{db_to_transmittance(40.0), 0.07},
                                 heterodyne_cfg());
    REQUIRE(report.K == 0.0);
    REQUIRE(report.chi_BE > 0.0);
  }
  SECTION("uncorrelated preparation yields zero rate") {
    auto stats = study_stats();
    stats.C_MB_x = stats.C_MB_p = 0.0;
    const auto report = key_rate(stats, ChannelParams{0.8, 0.0}, heterodyne_cfg());
    REQUIRE(report.I_AB == 0.0);
    REQUIRE(report.K == 0.0);
  }
  SECTION("reconciliation efficiency scales the information term") {
    auto cfg = homodyne_cfg();
    cfg.reconciliation_efficiency = 0.9;
    const auto full = key_rate(study_stats(), ChannelParams{0.5, 0.07}, homodyne_cfg());
    const auto scaled = key_rate(study_stats(), ChannelParams{0.5, 0.07}, cfg);
    REQUIRE(scaled.K == Approx(std::max(0.0, 0.9 * full.I_AB - full.chi_BE)).margin(1e-12));
  }
  SECTION("frozen regression constants, both detections") {
    // reference values from tests/oracle/holevo_oracle.py
    struct Case {
      double db;
      Detection det;
      double chi, k;
    };
    const Case cases[] = {
        {0.0, Detection::homodyne, 0.65355201908788208, 0.96363847171493678},
        {3.0, Detection::homodyne, 0.97398634888783665, 0.23683400762724387},
        {0.0, Detection::heterodyne, 1.1071946987598264, 1.3117578505224006},
        {3.0, Detection::heterodyne, 1.4171477019211376, 0.26832710356137643},
    };
    for (const auto& c : cases) {
      const auto cfg = c.det == Detection::homodyne ? homodyne_cfg() : heterodyne_cfg();
      const auto report =
          key_rate(study_stats(), ChannelParams{db_to_transmittance(c.db), 0.07}, cfg);
      REQUIRE(report.chi_BE == Approx(c.chi).margin(1e-9));
      REQUIRE(report.K == Approx(c.k).margin(1e-9));
    }
  }
}

TEST_CASE("key rate study-grid properties", "[keyrate][property]") {
  SECTION("pure-loss pure-preparation keeps a positive rate out to 20 dB") {
    for (int db = 0; db <= 20; ++db) {
      const auto hom =
          key_rate(study_stats(), ChannelParams{db_to_transmittance(db), 0.0}, homodyne_cfg());
      const auto het =
          key_rate(study_stats(), ChannelParams{db_to_transmittance(db), 0.0}, heterodyne_cfg());
      REQUIRE(hom.K > 0.0);
      REQUIRE(het.K > 0.0);
    }
  }
  SECTION("K is non-increasing in attenuation and in excess noise") {
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 30; ++i) {
      const double db = 0.5 * i;
      const auto report =
          key_rate(study_stats(), ChannelParams{db_to_transmittance(db), 0.07}, homodyne_cfg());
      REQUIRE(report.K <= previous + 1e-12);
      previous = report.K;
    }
    previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 10; ++i) {
      const auto report =
          key_rate(study_stats(), ChannelParams{0.5, 0.02 * i}, heterodyne_cfg());
      REQUIRE(report.K <= previous + 1e-12);
      previous = report.K;
    }
  }
  SECTION("homodyne is insensitive to unmeasured-quadrature noise up to a small systematic gap") {
    // the overlap in the study is graphical, not exact: the true gap peaks
    // around 1.2e-4 bits near 1.4 dB (see tests/oracle/oracle_output.txt)
    for (int i = 0; i <= 15; ++i) {
      const ChannelParams ch{db_to_transmittance(double(i)), 0.07};
      const auto clean = key_rate(study_stats(10.0, 10.0), ch, homodyne_cfg());
      const auto noisy_p = key_rate(study_stats(10.0, 10.1), ch, homodyne_cfg());
      REQUIRE(std::abs(clean.K - noisy_p.K) < 2e-4);
    }
  }
  SECTION("heterodyne rate is symmetric under swapping the noisy quadrature") {
    for (int i = 0; i <= 15; i += 3) {
      const ChannelParams ch{db_to_transmittance(double(i)), 0.07};
      const auto noisy_x = key_rate(study_stats(10.1, 10.0), ch, heterodyne_cfg());
      const auto noisy_p = key_rate(study_stats(10.0, 10.1), ch, heterodyne_cfg());
      REQUIRE(noisy_x.K == Approx(noisy_p.K).margin(1e-6));
    }
  }
  SECTION("heterodyne noise ordering") {
    for (int i = 0; i <= 15; i += 3) {
      const ChannelParams ch{db_to_transmittance(double(i)), 0.07};
      const double perfect = key_rate(study_stats(10.0, 10.0), ch, heterodyne_cfg()).K;
      const double one = key_rate(study_stats(10.1, 10.0), ch, heterodyne_cfg()).K;
      const double both = key_rate(study_stats(10.1, 10.1), ch, heterodyne_cfg()).K;
      REQUIRE(perfect >= one);
      REQUIRE(one >= both);
      if (both > 1e-6) {
        REQUIRE(perfect > one);
        REQUIRE(one > both);
      }
    }
  }
}
