#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "migrad/cli.hpp"

namespace {

struct FlagValues {
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<std::string> dims;
  std::optional<std::string> rho_grid;
  std::optional<double> threshold;
  std::optional<double> bandwidth;
  std::optional<std::string> rp_dims;
  std::optional<std::string> out;
  std::optional<std::string> config_path;
};

void add_common_options(CLI::App* cmd, FlagValues* flags) {
  cmd->add_option("--config", flags->config_path,
                  "key=value config file (flags take precedence)");
  cmd->add_option("--seed", flags->seed, "base RNG seed");
  cmd->add_option("--n", flags->n, "batch size per estimate");
  cmd->add_option("--dims", flags->dims, "comma-separated dimensions");
  cmd->add_option("--rho-grid", flags->rho_grid,
                  "comma-separated correlation grid");
  cmd->add_option("--threshold", flags->threshold,
                  "eigenvalue-mass truncation threshold");
  cmd->add_option("--bandwidth", flags->bandwidth,
                  "fixed kernel bandwidth (default: median heuristic)");
  cmd->add_option("--rp-dims", flags->rp_dims,
                  "comma-separated projection dimensions (rp-ablation)");
  cmd->add_option("--out", flags->out, "output CSV path ('-' for stdout)");
}

// Defaults, then the config file, then explicit flags.
int build_config(migrad::cli::Command command, const FlagValues& flags,
                 migrad::cli::RunConfig* config) {
  *config = migrad::cli::default_config(command);
  if (flags.config_path) {
    if (auto error = migrad::cli::apply_config_file(*flags.config_path, config)) {
      std::cerr << "config error: " << *error << '\n';
      return migrad::cli::kExitConfig;
    }
  }
  if (flags.seed) config->seed = *flags.seed;
  if (flags.n) config->n = *flags.n;
  if (flags.threshold) config->mass_threshold = *flags.threshold;
  if (flags.bandwidth) config->bandwidth = *flags.bandwidth;
  if (flags.out) config->output_path = *flags.out;
  if (flags.dims && !migrad::cli::parse_int_list(*flags.dims, &config->dims)) {
    std::cerr << "config error: bad --dims list\n";
    return migrad::cli::kExitConfig;
  }
  if (flags.rp_dims &&
      !migrad::cli::parse_int_list(*flags.rp_dims, &config->rp_dims)) {
    std::cerr << "config error: bad --rp-dims list\n";
    return migrad::cli::kExitConfig;
  }
  if (flags.rho_grid &&
      !migrad::cli::parse_double_list(*flags.rho_grid, &config->rho_grid)) {
    std::cerr << "config error: bad --rho-grid list\n";
    return migrad::cli::kExitConfig;
  }
  if (auto error = migrad::cli::validate(*config)) {
    std::cerr << "config error: " << *error << '\n';
    return migrad::cli::kExitConfig;
  }
  return migrad::cli::kExitOk;
}

int run_command(migrad::cli::Command command, const FlagValues& flags) {
  migrad::cli::RunConfig config;
  if (const int code = build_config(command, flags, &config);
      code != migrad::cli::kExitOk)
    return code;

  if (config.output_path == "-") {
    const int code = migrad::cli::run(config, std::cout);
    std::cout.flush();
    return std::cout ? code : migrad::cli::kExitIo;
  }
  std::ofstream out(config.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "io error: cannot open " << config.output_path
              << " for writing\n";
    return migrad::cli::kExitIo;
  }
  const int code = migrad::cli::run(config, out);
  out.flush();
  if (!out) {
    std::cerr << "io error: write to " << config.output_path << " failed\n";
    return migrad::cli::kExitIo;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-based mutual information gradient estimation harness"};
  app.require_subcommand(1);

  FlagValues flags;
  auto* scorecheck = app.add_subcommand(
      "scorecheck", "score estimator consistency sweep (CSV)");
  auto* toy = app.add_subcommand(
      "toy", "correlated-Gaussian MI gradient benchmark (CSV)");
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "gradient checks against closed-form oracles (CSV)");
  auto* rp_ablation = app.add_subcommand(
      "rp-ablation", "random projection dimension sweep (CSV)");
  for (auto* cmd : {scorecheck, toy, gradcheck, rp_ablation})
    add_common_options(cmd, &flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : migrad::cli::kExitConfig;
  }

  try {
    if (scorecheck->parsed())
      return run_command(migrad::cli::Command::kScoreCheck, flags);
    if (toy->parsed()) return run_command(migrad::cli::Command::kToy, flags);
    if (gradcheck->parsed())
      return run_command(migrad::cli::Command::kGradCheck, flags);
    return run_command(migrad::cli::Command::kRpAblation, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return migrad::cli::kExitConfig;
  }
}
