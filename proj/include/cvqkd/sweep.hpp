#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cvqkd/channel.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/scenario.hpp"

namespace cvqkd {

/// %.12g with the C locale; all CLI output funnels through this so equal
/// inputs give byte-identical files.
inline std::string format_g12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

struct SweepRow {
  double attenuation_db = 0.0;
  double eta = 0.0;
  double I_AB = 0.0;
  double S_E = 0.0;
  double S_E_given_B = 0.0;
  double chi_BE = 0.0;
  double key_rate = 0.0;
};

inline std::vector<SweepRow> run_sweep(const MeasuredPreparationStats& stats,
                                       const AttenuationGrid& grid, double epsilon,
                                       const ProtocolConfig& cfg) {
  validate(grid);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double db = grid.point(i);
    const ChannelParams ch{db_to_transmittance(db), epsilon};
    const KeyRateReport report = key_rate(stats, ch, cfg);
    rows.push_back({db, ch.eta, report.I_AB, report.S_E, report.S_E_given_B, report.chi_BE,
                    report.K});
  }
  return rows;
}

inline constexpr const char* kSweepCsvHeader =
    "attenuation_db,eta,I_AB,S_E,S_E_given_B,chi_BE,key_rate";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows)
    out << format_g12(r.attenuation_db) << ',' << format_g12(r.eta) << ',' << format_g12(r.I_AB)
        << ',' << format_g12(r.S_E) << ',' << format_g12(r.S_E_given_B) << ','
        << format_g12(r.chi_BE) << ',' << format_g12(r.key_rate) << '\n';
}

/// The asymmetric-preparation-noise study: modulation variance 9 in both
/// quadratures, correlations (+9,-9), signal variance 10 with 0.1 SNU of
/// preparation noise added per variant, channel excess noise 0.07.
inline constexpr double kStudyEpsilon = 0.07;

struct StudyVariant {
  const char* name;
  MeasuredPreparationStats stats;
};

inline std::vector<StudyVariant> preparation_noise_variants() {
  const auto stats = [](double v_b_x, double v_b_p) {
    MeasuredPreparationStats s;
    s.V_M_x = s.V_M_p = 9.0;
    s.C_MB_x = 9.0;
    s.C_MB_p = -9.0;
    s.V_B_x = v_b_x;
    s.V_B_p = v_b_p;
    return s;
  };
  return {{"perfect", stats(10.0, 10.0)},
          {"noise_p", stats(10.0, 10.1)},
          {"noise_x", stats(10.1, 10.0)},
          {"noise_both", stats(10.1, 10.1)}};
}

inline AttenuationGrid study_grid() { return {0.0, 15.0, 0.1}; }

}  // namespace cvqkd
