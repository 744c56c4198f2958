#include "migrad/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "migrad/encoders.hpp"
#include "migrad/mi_gradient.hpp"
#include "migrad/oracles.hpp"
#include "migrad/rng.hpp"
#include "migrad/ssge.hpp"

namespace migrad::cli {

namespace {

// Stein residual of a freshly fitted estimator, evaluated on its own base
// samples. Calibrated on reference runs across d in {1, 5, 10, 20} at
// M = 1600 (observed <= 0.03) and frozen with headroom.
constexpr double kFittedResidualBound = 0.10;

const int kScorecheckSampleSizes[] = {100, 400, 1600};
constexpr int kScorecheckQueryCount = 200;
constexpr int kToyRepeats = 3;
constexpr int kRpAblationRepeats = 5;

SsgeConfig ssge_config(const RunConfig& config) {
  SsgeConfig out;
  out.bandwidth = config.bandwidth;
  out.mass_threshold = config.mass_threshold;
  return out;
}

double relative_error(double estimate, double target) {
  return target != 0.0 ? std::abs(estimate - target) / std::abs(target)
                       : std::abs(estimate);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

bool parse_int_list(const std::string& text, std::vector<int>* out) {
  out->clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) return false;
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) return false;
      out->push_back(v);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out->empty();
}

bool parse_double_list(const std::string& text, std::vector<double>* out) {
  out->clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) return false;
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) return false;
      out->push_back(v);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out->empty();
}

RunConfig default_config(Command command) {
  RunConfig config;
  config.command = command;
  config.rho_grid.clear();
  for (int i = -9; i <= 9; ++i) config.rho_grid.push_back(0.1 * i);
  if (command == Command::kRpAblation) {
    config.dims = {512};
    config.rho_grid = {0.5};
    config.n = 2000;
  }
  return config;
}

std::optional<std::string> apply_config_file(const std::string& path,
                                             RunConfig* config) {
  std::ifstream in(path);
  if (!in) return "cannot open config file: " + path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      return "config line " + std::to_string(line_no) + ": expected key=value";
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = "config line " + std::to_string(line_no);
    try {
      if (key == "seed") {
        config->seed = std::stoull(value);
      } else if (key == "n") {
        config->n = std::stoi(value);
      } else if (key == "threshold") {
        config->mass_threshold = std::stod(value);
      } else if (key == "bandwidth") {
        config->bandwidth = std::stod(value);
      } else if (key == "out") {
        config->output_path = value;
      } else if (key == "dims") {
        if (!parse_int_list(value, &config->dims))
          return where + ": bad integer list for dims";
      } else if (key == "rp_dims") {
        if (!parse_int_list(value, &config->rp_dims))
          return where + ": bad integer list for rp_dims";
      } else if (key == "rho_grid") {
        if (!parse_double_list(value, &config->rho_grid))
          return where + ": bad number list for rho_grid";
      } else {
        return where + ": unknown key '" + key + "'";
      }
    } catch (const std::exception&) {
      return where + ": bad value for '" + key + "'";
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const RunConfig& config) {
  if (config.n < 2) return "n must be at least 2";
  if (config.dims.empty()) return "dims must not be empty";
  for (int d : config.dims)
    if (d < 1) return "dims entries must be >= 1";
  if (config.rho_grid.empty()) return "rho_grid must not be empty";
  for (double rho : config.rho_grid)
    if (!(std::abs(rho) < 1.0)) return "rho values must lie strictly inside (-1, 1)";
  if (!(config.mass_threshold > 0.0) || config.mass_threshold > 1.0)
    return "threshold must lie in (0, 1]";
  if (config.bandwidth && !(*config.bandwidth > 0.0))
    return "bandwidth must be positive";
  if (config.command == Command::kRpAblation) {
    if (config.rp_dims.empty()) return "rp_dims must not be empty";
    for (int k : config.rp_dims)
      if (k < 1) return "rp_dims entries must be >= 1";
    const int d = config.dims.front();
    const int k_max = *std::max_element(config.rp_dims.begin(), config.rp_dims.end());
    if (k_max > d)
      return "rp_dims contains " + std::to_string(k_max) +
             " which exceeds the problem dimension " + std::to_string(d);
  }
  return std::nullopt;
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

int run_scorecheck(const RunConfig& config, std::ostream& out) {
  out << "dist,d,M,rmse_vs_analytic,stein_residual\n";
  const SsgeConfig fit_config = ssge_config(config);
  bool tolerances_ok = true;
  for (std::size_t d_idx = 0; d_idx < config.dims.size(); ++d_idx) {
    const int d = config.dims[d_idx];
    double previous_rmse = 0.0;
    for (std::size_t m_idx = 0; m_idx < std::size(kScorecheckSampleSizes);
         ++m_idx) {
      const int M = kScorecheckSampleSizes[m_idx];
      const std::uint64_t point_seed = mix_seed(config.seed, d_idx, m_idx);
      const Eigen::MatrixXd X = standard_normal(M, d, mix_seed(point_seed, 0));
      const FittedScoreEstimator est = fit_score_estimator(X, fit_config);

      const Eigen::MatrixXd queries =
          standard_normal(kScorecheckQueryCount, d, mix_seed(point_seed, 1));
      // Standard normal target: the true score is -x.
      const Eigen::MatrixXd err = est.score(queries) + queries;
      const double rmse =
          std::sqrt(err.array().square().sum() / (err.rows() * err.cols()));
      const double residual = stein_residual(est.kernel(), X, est.score(X));

      out << "std_normal," << d << ',' << M << ',' << format_number(rmse)
          << ',' << format_number(residual) << '\n';

      if (m_idx > 0 && rmse > previous_rmse) tolerances_ok = false;
      if (M == 1600 && residual > kFittedResidualBound) tolerances_ok = false;
      previous_rmse = rmse;
    }
  }
  return tolerances_ok ? kExitOk : kExitTolerance;
}

int run_toy(const RunConfig& config, std::ostream& out) {
  out << "d,rho,n,seed,grad_estimate,grad_analytic,rel_err,j_used,eigen_mass\n";
  const SsgeConfig fit_config = ssge_config(config);
  for (std::size_t d_idx = 0; d_idx < config.dims.size(); ++d_idx) {
    const int d = config.dims[d_idx];
    for (std::size_t rho_idx = 0; rho_idx < config.rho_grid.size(); ++rho_idx) {
      const double rho = config.rho_grid[rho_idx];
      for (int repeat = 0; repeat < kToyRepeats; ++repeat) {
        const std::uint64_t shown_seed = config.seed + repeat;
        const std::uint64_t stream = mix_seed(shown_seed, d_idx, rho_idx);
        const Eigen::MatrixXd X =
            standard_normal(config.n, d, mix_seed(stream, 0));
        const GaussianChannelEncoder encoder(d, rho);
        const GradientReport report = mi_gradient_stochastic(
            encoder, X, 1, fit_config, mix_seed(stream, 1));
        const double estimate = report.gradient(0);
        const double analytic = analytic_mi_grad({d, rho});
        out << d << ',' << format_number(rho) << ',' << config.n << ','
            << shown_seed << ',' << format_number(estimate) << ','
            << format_number(analytic) << ','
            << format_number(relative_error(estimate, analytic)) << ','
            << report.diagnostics.j_used << ','
            << format_number(report.diagnostics.eigen_mass) << '\n';
      }
    }
  }
  return kExitOk;
}

namespace {

struct GradCheckRow {
  std::string name;
  int param_index;
  double estimate;
  double target;
};

void write_gradcheck_row(std::ostream& out, const GradCheckRow& row) {
  const double abs_err = std::abs(row.estimate - row.target);
  out << row.name << ',' << row.param_index << ','
      << format_number(row.estimate) << ',' << format_number(row.target) << ','
      << format_number(abs_err) << ','
      << format_number(relative_error(row.estimate, row.target)) << '\n';
}

}  // namespace

int run_gradcheck(const RunConfig& config, std::ostream& out) {
  out << "case,param_index,mige,finite_diff_of_analytic_mi,abs_err,rel_err\n";
  const SsgeConfig fit_config = ssge_config(config);
  bool tolerances_ok = true;
  constexpr double kFdStep = 1e-4;

  // Entropy oracle: z = sigma x on standard normal data has
  // H(sigma) = 1/2 log(2 pi e sigma^2), so the gradient target is 1/sigma.
  const auto scale_entropy = [](const Eigen::VectorXd& theta) {
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * theta(0) *
                          theta(0));
  };
  const struct {
    const char* name;
    double sigma;
    double tolerance;
  } entropy_cases[] = {{"entropy_scale_sigma1", 1.0, 0.10},
                       {"entropy_scale_sigma2", 2.0, 0.08}};
  for (std::size_t c = 0; c < std::size(entropy_cases); ++c) {
    const auto& ec = entropy_cases[c];
    const std::uint64_t stream = mix_seed(config.seed, 10 + c);
    const int n = 2000;
    const Eigen::MatrixXd X = standard_normal(n, 1, mix_seed(stream, 0));
    const ScaleEncoder encoder(1, ec.sigma);
    const GradientReport report =
        entropy_gradient(encoder, X, fit_config, mix_seed(stream, 1));
    Eigen::VectorXd theta(1);
    theta << ec.sigma;
    const double target = finite_diff(scale_entropy, theta, kFdStep)(0);
    write_gradcheck_row(out, {ec.name, 0, report.gradient(0), target});
    if (std::abs(report.gradient(0) - target) > ec.tolerance)
      tolerances_ok = false;
  }

  {
    // One-dimensional Gaussian channel z = w x + eta.
    const std::uint64_t stream = mix_seed(config.seed, 20);
    const int n = 4000;
    const double noise_var = 1.0;
    Eigen::MatrixXd W(1, 1);
    W << 1.0;
    const Eigen::MatrixXd X = standard_normal(n, 1, mix_seed(stream, 0));
    const LinearGaussianEncoder encoder(W, std::sqrt(noise_var));
    const GradientReport report = mi_gradient_stochastic(
        encoder, X, 1, fit_config, mix_seed(stream, 1));
    const auto mi = [&](const Eigen::VectorXd& theta) {
      Eigen::MatrixXd w(1, 1);
      w << theta(0);
      return linear_gaussian_mi(w, noise_var);
    };
    Eigen::VectorXd theta(1);
    theta << 1.0;
    const double target = finite_diff(mi, theta, kFdStep)(0);
    write_gradcheck_row(out, {"linear_gaussian_1d", 0, report.gradient(0), target});
    if (relative_error(report.gradient(0), target) > 0.15) tolerances_ok = false;
  }

  {
    // Two-stage chain h = A x + eta_a, z = B h + eta_b; the whole gradient
    // over (A, B) is checked in norm against finite differences of the
    // closed-form MI.
    const std::uint64_t stream = mix_seed(config.seed, 30);
    const int n = 4000;
    const double var_a = 1.0;
    const double var_b = 1.0;
    Eigen::MatrixXd A(2, 2), B(2, 2);
    A << 0.9, 0.2, -0.3, 1.1;
    B << 1.0, -0.4, 0.5, 0.8;
    const Eigen::MatrixXd X = standard_normal(n, 2, mix_seed(stream, 0));
    const LinearGaussianEncoder first(A, std::sqrt(var_a));
    const LinearGaussianEncoder second(B, std::sqrt(var_b));
    const GradientReport report = mi_gradient_two_stage(
        first, second, X, fit_config, mix_seed(stream, 1));

    const auto mi = [&](const Eigen::VectorXd& theta) {
      Eigen::MatrixXd a(2, 2), b(2, 2);
      a << theta(0), theta(1), theta(2), theta(3);
      b << theta(4), theta(5), theta(6), theta(7);
      return linear_chain_mi(a, var_a, b, var_b);
    };
    Eigen::VectorXd theta(8);
    theta << A(0, 0), A(0, 1), A(1, 0), A(1, 1), B(0, 0), B(0, 1), B(1, 0),
        B(1, 1);
    const Eigen::VectorXd target = finite_diff(mi, theta, kFdStep);
    for (int p = 0; p < 8; ++p)
      write_gradcheck_row(out,
                          {"linear_chain", p, report.gradient(p), target(p)});
    const double norm_rel =
        (report.gradient - target).norm() / target.norm();
    if (norm_rel > 0.15) tolerances_ok = false;
  }

  {
    // Encoders without trainable parameters yield an empty gradient; the row
    // keeps the schema with param_index -1 and empty numeric cells.
    const std::uint64_t stream = mix_seed(config.seed, 40);
    const Eigen::MatrixXd X = standard_normal(100, 2, mix_seed(stream, 0));
    const IdentityEncoder encoder(2);
    const GradientReport report =
        entropy_gradient(encoder, X, fit_config, mix_seed(stream, 1));
    if (report.gradient.size() == 0) out << "zero_param,-1,,,,\n";
  }

  return tolerances_ok ? kExitOk : kExitTolerance;
}

int run_rp_ablation(const RunConfig& config, std::ostream& out) {
  out << "d,k,rho,grad_estimate,grad_analytic,rel_err,wall_ms\n";
  const SsgeConfig fit_config = ssge_config(config);
  const int d = config.dims.front();
  const double rho = config.rho_grid.front();
  const double analytic = analytic_mi_grad({d, rho});

  for (int repeat = 0; repeat < kRpAblationRepeats; ++repeat) {
    const std::uint64_t stream = mix_seed(config.seed + repeat, 1000);
    const Eigen::MatrixXd X = standard_normal(config.n, d, mix_seed(stream, 0));
    const std::uint64_t mi_seed = mix_seed(stream, 1);
    const GaussianChannelEncoder encoder(d, rho);

    // k = 0 row: the unprojected baseline at the same data and seed.
    const auto emit = [&](int k, const RandomProjector* projector) {
      const auto t0 = std::chrono::steady_clock::now();
      const GradientReport report = mi_gradient_stochastic(
          encoder, X, 1, fit_config, mi_seed, projector);
      const auto t1 = std::chrono::steady_clock::now();
      const auto wall_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
      const double estimate = report.gradient(0);
      out << d << ',' << k << ',' << format_number(rho) << ','
          << format_number(estimate) << ',' << format_number(analytic) << ','
          << format_number(relative_error(estimate, analytic)) << ','
          << wall_ms << '\n';
    };

    emit(0, nullptr);
    for (std::size_t k_idx = 0; k_idx < config.rp_dims.size(); ++k_idx) {
      const int k = config.rp_dims[k_idx];
      const RandomProjector projector(d, k, mix_seed(stream, 2 + k_idx));
      emit(k, &projector);
    }
  }
  return kExitOk;
}

int run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::kScoreCheck:
      return run_scorecheck(config, out);
    case Command::kToy:
      return run_toy(config, out);
    case Command::kGradCheck:
      return run_gradcheck(config, out);
    case Command::kRpAblation:
      return run_rp_ablation(config, out);
  }
  return kExitConfig;
}

}  // namespace migrad::cli
