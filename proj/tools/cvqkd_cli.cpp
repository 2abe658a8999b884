// Batch front end: key-rate evaluation, attenuation sweeps, the
// preparation-noise study, purification inspection, and sample-file
// estimation. All numeric output is %.12g, '.' decimal point, '\n' endings,
// so equal inputs produce byte-identical output.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/cvqkd.hpp"

namespace {

using namespace cvqkd;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct IoFailure {
  std::string message;
};

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure{"cannot open config file '" + path + "'"};
  return parse_scenario(in);
}

ChannelParams fixed_channel(const Scenario& scenario, std::optional<double> eta_override,
                            std::optional<double> attenuation_db,
                            std::optional<double> epsilon_override) {
  ChannelParams ch;
  if (eta_override && attenuation_db)
    throw ConfigError("--eta and --attenuation-db are mutually exclusive");
  if (eta_override)
    ch.eta = *eta_override;
  else if (attenuation_db)
    ch.eta = db_to_transmittance(*attenuation_db);
  else if (scenario.eta)
    ch.eta = *scenario.eta;
  else
    throw ConfigError("this command needs a fixed channel: set 'eta' in the config "
                      "or pass --eta/--attenuation-db");
  ch.epsilon = epsilon_override ? *epsilon_override : scenario.epsilon;
  validate(ch);
  return ch;
}

void print_value(std::ostream& out, const char* name, double value) {
  out << name << " = " << format_g12(value) << '\n';
}

void print_report(std::ostream& out, const KeyRateReport& report) {
  print_value(out, "I_AB", report.I_AB);
  print_value(out, "S_E", report.S_E);
  print_value(out, "S_E_given_B", report.S_E_given_B);
  print_value(out, "chi_BE", report.chi_BE);
  print_value(out, "key_rate", report.K);
  print_value(out, "V1", report.purification.V1);
  print_value(out, "V2", report.purification.V2);
  print_value(out, "s1", report.purification.s1);
  print_value(out, "s2", report.purification.s2);
  print_value(out, "T1", report.purification.T1);
  print_value(out, "T2", report.purification.T2);
}

void print_stats(std::ostream& out, const char* prefix, const MeasuredPreparationStats& s) {
  out << prefix << ".V_M_x = " << format_g12(s.V_M_x) << '\n'
      << prefix << ".V_M_p = " << format_g12(s.V_M_p) << '\n'
      << prefix << ".V_B_x = " << format_g12(s.V_B_x) << '\n'
      << prefix << ".V_B_p = " << format_g12(s.V_B_p) << '\n'
      << prefix << ".C_MB_x = " << format_g12(s.C_MB_x) << '\n'
      << prefix << ".C_MB_p = " << format_g12(s.C_MB_p) << '\n';
}

void print_post_stats(std::ostream& out, const char* prefix, const PostChannelStats& s) {
  out << prefix << ".V_M_x = " << format_g12(s.V_M_x) << '\n'
      << prefix << ".V_M_p = " << format_g12(s.V_M_p) << '\n'
      << prefix << ".V_Bp_x = " << format_g12(s.V_Bp_x) << '\n'
      << prefix << ".V_Bp_p = " << format_g12(s.V_Bp_p) << '\n'
      << prefix << ".C_MBp_x = " << format_g12(s.C_MBp_x) << '\n'
      << prefix << ".C_MBp_p = " << format_g12(s.C_MBp_p) << '\n';
}

int cmd_keyrate(const std::string& config_path, std::optional<double> eta,
                std::optional<double> attenuation_db, std::optional<double> epsilon) {
  const Scenario scenario = load_scenario(config_path);
  const ChannelParams ch = fixed_channel(scenario, eta, attenuation_db, epsilon);
  const KeyRateReport report = key_rate(scenario.stats, ch, scenario.protocol);
  print_report(std::cout, report);
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_path) {
  const Scenario scenario = load_scenario(config_path);
  if (!scenario.grid)
    throw ConfigError("'sweep' needs an attenuation grid: set grid_start_db, grid_stop_db, "
                      "grid_step_db in the config");
  const auto rows = run_sweep(scenario.stats, *scenario.grid, scenario.epsilon, scenario.protocol);
  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) throw IoFailure{"cannot open output file '" + *out_path + "'"};
    write_sweep_csv(out, rows);
    if (!out) throw IoFailure{"failed writing output file '" + *out_path + "'"};
  } else {
    write_sweep_csv(std::cout, rows);
  }
  return 0;
}

int cmd_figure2(const std::string& panel, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure{"cannot create output directory '" + out_dir + "': " + ec.message()};

  ProtocolConfig cfg;
  cfg.detection = panel == "homodyne" ? Detection::homodyne : Detection::heterodyne;
  for (const auto& variant : preparation_noise_variants()) {
    const auto rows = run_sweep(variant.stats, study_grid(), kStudyEpsilon, cfg);
    const fs::path path = fs::path(out_dir) / (panel + "_" + variant.name + ".csv");
    std::ofstream out(path);
    if (!out) throw IoFailure{"cannot open output file '" + path.string() + "'"};
    write_sweep_csv(out, rows);
    if (!out) throw IoFailure{"failed writing output file '" + path.string() + "'"};
  }
  return 0;
}

int cmd_purify(const std::string& config_path) {
  const Scenario scenario = load_scenario(config_path);
  const TwoModeState state = build_equivalent_state(scenario.stats);
  const PurifiedState purified = purify(state);
  print_value(std::cout, "V1", purified.params.V1);
  print_value(std::cout, "V2", purified.params.V2);
  print_value(std::cout, "s1", purified.params.s1);
  print_value(std::cout, "s2", purified.params.s2);
  print_value(std::cout, "T1", purified.params.T1);
  print_value(std::cout, "T2", purified.params.T2);
  print_value(std::cout, "purity_residual",
              symplectic_eigenvalues(purified.gamma_abcd).max_deviation_from_pure());
  return 0;
}

int cmd_estimate(const std::string& samples_path, const std::string& protocol, double eta,
                 double epsilon, const std::string& quadrature, const std::string& log_base,
                 double beta) {
  std::ifstream in(samples_path);
  if (!in) throw IoFailure{"cannot open samples file '" + samples_path + "'"};

  ProtocolConfig cfg;
  cfg.detection = protocol == "homodyne" ? Detection::homodyne : Detection::heterodyne;
  cfg.measured_quadrature = quadrature == "p" ? Quadrature::p : Quadrature::x;
  cfg.log_base = log_base == "e" ? LogBase::e : LogBase::two;
  cfg.reconciliation_efficiency = beta;

  PostChannelStats post;
  if (cfg.detection == Detection::heterodyne) {
    const auto samples = read_heterodyne_samples(in);
    post = estimate_stats(std::span<const HeterodyneSample>(samples));
  } else {
    const auto samples = read_homodyne_samples(in);
    post = estimate_stats(std::span<const HomodyneSample>(samples));
  }
  print_post_stats(std::cout, "estimated", post);

  const ChannelParams ch{eta, epsilon};
  validate(ch);
  const MeasuredPreparationStats pre = reconstruct_pre_channel(post, ch);
  print_stats(std::cout, "reconstructed", pre);

  const KeyRateReport report = key_rate(pre, ch, cfg);
  print_report(std::cout, report);
  return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_path, std::uint64_t count,
              std::uint64_t seed, std::optional<double> eta, std::optional<double> attenuation_db,
              std::optional<double> epsilon) {
  const Scenario scenario = load_scenario(config_path);
  const ChannelParams ch = fixed_channel(scenario, eta, attenuation_db, epsilon);
  const PostChannelStats post = transform_stats(scenario.stats, ch);

  std::ofstream out(out_path);
  if (!out) throw IoFailure{"cannot open output file '" + out_path + "'"};
  if (scenario.protocol.detection == Detection::heterodyne) {
    out << "m_x,m_p,b_x,b_p\n";
    for (const auto& s : synthesize_heterodyne_samples(post, count, seed))
      out << format_g12(s.m_x) << ',' << format_g12(s.m_p) << ',' << format_g12(s.b_x) << ','
          << format_g12(s.b_p) << '\n';
  } else {
    out << "m_x,m_p,basis,b\n";
    for (const auto& s : synthesize_homodyne_samples(post, count, seed))
      out << format_g12(s.m_x) << ',' << format_g12(s.m_p) << ','
          << (s.basis == Quadrature::x ? 'x' : 'p') << ',' << format_g12(s.b) << '\n';
  }
  if (!out) throw IoFailure{"failed writing output file '" + out_path + "'"};
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic key-rate bounds for coherent-state CV QKD from measured, generally "
               "asymmetric preparation statistics"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir, panel, samples_path;
  std::string protocol, quadrature = "x", log_base = "2";
  std::optional<double> eta_override, attenuation_db, epsilon_override;
  std::optional<std::string> sweep_out;
  double eta = 1.0, epsilon = 0.0, beta = 1.0;
  std::uint64_t count = 1000000, seed = 20200522;

  auto* keyrate_cmd = app.add_subcommand("keyrate", "Evaluate one scenario and print the report");
  keyrate_cmd->add_option("--config", config_path, "Scenario config file")->required();
  keyrate_cmd->add_option("--eta", eta_override, "Override channel transmittance");
  keyrate_cmd->add_option("--attenuation-db", attenuation_db, "Override channel attenuation [dB]");
  keyrate_cmd->add_option("--epsilon", epsilon_override, "Override channel excess noise [SNU]");

  auto* sweep_cmd = app.add_subcommand("sweep", "Key rate over an attenuation grid, CSV output");
  sweep_cmd->add_option("--config", config_path, "Scenario config file with grid keys")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output CSV path (default: stdout)");

  auto* figure2_cmd =
      app.add_subcommand("figure2", "Preparation-noise study: four CSV curves per panel");
  figure2_cmd->add_option("--panel", panel, "Detection panel")
      ->required()
      ->check(CLI::IsMember({"homodyne", "heterodyne"}));
  figure2_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* purify_cmd =
      app.add_subcommand("purify", "Solve the purification network for a scenario's state");
  purify_cmd->add_option("--config", config_path, "Scenario config file")->required();

  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate statistics from a samples CSV and run the full pipeline");
  estimate_cmd->add_option("samples", samples_path, "Samples CSV file")->required();
  estimate_cmd->add_option("--protocol", protocol, "Detection protocol of the samples")
      ->required()
      ->check(CLI::IsMember({"homodyne", "heterodyne"}));
  estimate_cmd->add_option("--eta", eta, "Channel transmittance used for reconstruction");
  estimate_cmd->add_option("--epsilon", epsilon, "Channel excess noise [SNU]");
  estimate_cmd->add_option("--quadrature", quadrature, "Homodyne key quadrature")
      ->check(CLI::IsMember({"x", "p"}));
  estimate_cmd->add_option("--log-base", log_base, "Information unit")
      ->check(CLI::IsMember({"2", "e"}));
  estimate_cmd->add_option("--beta", beta, "Reconciliation efficiency in (0,1]");

  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate synthetic post-channel samples for a scenario (testing aid)");
  synth_cmd->add_option("--config", config_path, "Scenario config file")->required();
  synth_cmd->add_option("--out", out_path, "Output CSV path")->required();
  synth_cmd->add_option("--n", count, "Number of records");
  synth_cmd->add_option("--seed", seed, "RNG seed");
  synth_cmd->add_option("--eta", eta_override, "Override channel transmittance");
  synth_cmd->add_option("--attenuation-db", attenuation_db, "Override channel attenuation [dB]");
  synth_cmd->add_option("--epsilon", epsilon_override, "Override channel excess noise [SNU]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (keyrate_cmd->parsed())
      return cmd_keyrate(config_path, eta_override, attenuation_db, epsilon_override);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, sweep_out);
    if (figure2_cmd->parsed()) return cmd_figure2(panel, out_dir);
    if (purify_cmd->parsed()) return cmd_purify(config_path);
    if (estimate_cmd->parsed())
      return cmd_estimate(samples_path, protocol, eta, epsilon, quadrature, log_base, beta);
    if (synth_cmd->parsed())
      return cmd_synth(config_path, out_path, count, seed, eta_override, attenuation_db,
                       epsilon_override);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::numerical ? kExitNumerical : kExitValidation;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
