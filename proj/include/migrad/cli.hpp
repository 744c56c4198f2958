#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace migrad::cli {

enum class Command { kScoreCheck, kToy, kGradCheck, kRpAblation };

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitTolerance = 3;

struct RunConfig {
  Command command = Command::kToy;
  std::uint64_t seed = 1;
  int n = 4000;
  std::vector<int> dims = {5, 10, 20};
  std::vector<double> rho_grid;  // filled by default_config
  double mass_threshold = 0.94;
  std::optional<double> bandwidth;
  std::vector<int> rp_dims = {16, 32, 64, 128, 256, 512};
  std::string output_path = "-";  // "-" writes to stdout
};

// Built-in defaults per command: toy/scorecheck/gradcheck share the
// d = {5, 10, 20} sweep and the 19-point rho grid from -0.9 to 0.9;
// rp-ablation fixes one high-dimensional problem (d = 512, rho = 0.5,
// n = 2000) and sweeps the projection dimension.
RunConfig default_config(Command command);

// Parse one key=value per line ('#' comments, blank lines allowed).
// Recognized keys: seed, n, dims, rho_grid, threshold, bandwidth, rp_dims,
// out. Returns an error message on malformed input.
std::optional<std::string> apply_config_file(const std::string& path,
                                             RunConfig* config);

// Validation shared by all commands; returns an error message when the
// configuration is unusable.
std::optional<std::string> validate(const RunConfig& config);

// Numeric CSV cell: 6 significant digits, lowercase scientific notation
// exactly when |v| < 1e-4 or |v| >= 1e6.
std::string format_number(double value);

// Comma-separated list parsing shared by flags and config files.
bool parse_int_list(const std::string& text, std::vector<int>* out);
bool parse_double_list(const std::string& text, std::vector<double>* out);

// Run one subcommand, writing its CSV to `out`. Returns an exit code;
// tolerance-gated commands return kExitTolerance when a pinned bound fails.
int run(const RunConfig& config, std::ostream& out);

int run_scorecheck(const RunConfig& config, std::ostream& out);
int run_toy(const RunConfig& config, std::ostream& out);
int run_gradcheck(const RunConfig& config, std::ostream& out);
int run_rp_ablation(const RunConfig& config, std::ostream& out);

}  // namespace migrad::cli
