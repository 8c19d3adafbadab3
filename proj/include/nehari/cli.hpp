#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nehari/analysis.hpp"

namespace nehari::cli {

enum class SeedKind { V0, Radial, File };

/// Flat key=value configuration with dotted section prefixes.
struct RunConfig {
  // problem.*
  std::string preset = "henon";  ///< henon | nls
  DomainKind domain = DomainKind::Interval;
  double l = 1.0;
  double p = 3.0;
  double omega = 4.0;
  double lambda = 10.0;
  Resolution resolution;
  double lin_tol = 0.0;  ///< 0 keeps the per-domain default

  // optimizer.*
  NmomConfig optimizer;

  // experiment.*
  double l_lo = 1.0;
  double l_hi = 2.0;
  double bisect_tol = 0.01;
  double bisect_eps_tol = 1e-7;
  bool warm_start = true;
  std::vector<double> p_grid{2.0, 2.5, 3.0, 3.5, 4.0, 5.0};
  double k_lo = 2.0;  ///< sweep bracket (k_lo, k_hi) / (p - 1)
  double k_hi = 3.0;
  std::string fit = "auto";  ///< inverse | exp | auto (inverse on the interval, exp on the disk)
  int eigen_k = 0;           ///< solve: report this many Hessian eigenvalues
  std::string results_file = "results.csv";

  // seed.*
  SeedKind seed_kind = SeedKind::V0;
  std::string seed_file;
  unsigned random_seed = 12345;

  [[nodiscard]] EllipticProblem problem() const;
  [[nodiscard]] std::optional<LinearSolverOptions> linear() const;
  [[nodiscard]] BisectionOptions bisection() const;
};

/// Throws ConfigError naming the key on unknown keys, bad values or
/// out-of-range parameters.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

struct CommandOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
  bool quiet = false;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheckFailed = 4;

int cmd_solve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bisect(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_fit(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Parses the config and dispatches; config and I/O errors map to exit 1.
int run_command(const std::string& name, const std::filesystem::path& config, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

/// --threads, overridden by NEHARI_OPT_THREADS when set.
int resolve_threads(int flag_value);

/// Random combination of a few smooth modes vanishing on the boundary.
DiscreteField random_smooth_field(const Discretization& disc, std::mt19937_64& rng);

/// Radial or paper initial guess, or the field stored in seed.file.
DiscreteField initial_direction(const RunConfig& cfg, const EllipticModel& model);

}  // namespace nehari::cli
