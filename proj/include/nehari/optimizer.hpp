#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nehari/manifold.hpp"

namespace nehari {

struct NmomConfig {
  double sigma = 1e-3;      ///< Armijo parameter, (0, 1)
  double beta = 0.25;       ///< backtracking factor, (0, 1)
  double rho = 0.85;        ///< nonmonotone weight, [0, 1)
  double alpha_min = 1.0;
  double alpha_max = 10.0;
  double eps_tol = 1e-6;    ///< stop when ‖∇_N E‖_H < eps_tol
  double tau0 = 1.0;        ///< first trial step
  int max_iter = 5000;
  int max_backtracks = 50;
  /// Stagnation stop: |E_n - E_{n-1}| < stagnation_tol (1 + |E_n|) for
  /// stagnation_window consecutive steps.
  double stagnation_tol = 1e-15;
  int stagnation_window = 20;
  ManifoldTolerances manifold;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Zhang-Hager reference value C_n and weight Q_n.
struct NonmonotoneState {
  double c_n = 0.0;
  double q_n = 1.0;

  static NonmonotoneState initial(double e0) { return {e0, 1.0}; }
};

/// Q⁺ = ϱQ + 1, C⁺ = (ϱQC + e_next) / Q⁺.
NonmonotoneState update_nonmonotone(const NonmonotoneState& state, double e_next, double rho);

/// H-inner products of v = u_n - u_{n-1} and y = ∇_N E(u_n) - ∇_N E(u_{n-1}).
struct StepProducts {
  double vv = 0.0;
  double vy = 0.0;
  double yy = 0.0;
};

StepProducts step_products(const NehariFunctional& f, const DiscreteField& v, const DiscreteField& y);

/// τ₀ at n = 0, then clamped BB1 (odd n) and BB2 (even n). A zero or
/// non-finite BB quotient falls back to alpha_max.
double bb_trial_step(int n, const StepProducts& prev, const NmomConfig& cfg);

struct LineSearchResult {
  double alpha = 0.0;
  ManifoldPoint next;
  int backtracks = 0;
};

/// Largest α = α₀βᵐ with E(R_u(αξ)) <= C_n + σα slope, where
/// slope = (∇_N E(u), ξ)_H < 0. Throws LineSearchFailure after
/// max_backtracks reductions.
LineSearchResult backtracking_search(const NehariFunctional& f, const ManifoldPoint& u, const TangentVector& xi,
                                     double slope, const NonmonotoneState& state, double alpha0,
                                     const NmomConfig& cfg);

/// Chooses ξ_n from the Riemannian gradient.
class DirectionPolicy {
 public:
  virtual ~DirectionPolicy() = default;
  [[nodiscard]] virtual TangentVector direction(const NehariFunctional& f, const ManifoldPoint& u,
                                                const RiemannianGradient& grad) const = 0;
};

/// ξ_n = -∇_N E(u_n).
class SteepestDescent final : public DirectionPolicy {
 public:
  [[nodiscard]] TangentVector direction(const NehariFunctional& f, const ManifoldPoint& u,
                                        const RiemannianGradient& grad) const override;
};

enum class RunStatus { Converged, MaxIter, LineSearchFailure };
const char* to_string(RunStatus status) noexcept;

/// One row per iterate u_n. Step fields describe the move to u_{n+1} and
/// are zero on the final row.
struct IterationRecord {
  int n = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  int backtracks = 0;
  double c_n = 0.0;
  double q_n = 0.0;
  double nehari_residual = 0.0;
  double norm_sq = 0.0;
  double trial_alpha = 0.0;
  double slope = 0.0;          ///< (∇_N E(u_n), ξ_n)_H
  double direction_norm = 0.0; ///< ‖ξ_n‖_H
  double step_norm = 0.0;      ///< ‖u_{n+1} - u_n‖_H
};

struct RunRecord {
  std::vector<IterationRecord> trace;
  ManifoldPoint solution;
  RunStatus status = RunStatus::MaxIter;
  std::string message;
  double final_grad_norm = 0.0;
  /// ‖∇E(u)‖_H at the final iterate.
  double final_full_grad_norm = 0.0;

  [[nodiscard]] int iterations() const noexcept {
    return trace.empty() ? 0 : static_cast<int>(trace.size()) - 1;
  }
};

/// Runs the NMOM from u₀ = ρ(v₀)v₀. Line-search failure ends the run with
/// status LineSearchFailure; linear-solve failures propagate.
RunRecord nmom_run(const NehariFunctional& f, const DiscreteField& u0_direction, const NmomConfig& cfg,
                   const DirectionPolicy& policy = SteepestDescent{});

/// CSV: n,energy,grad_norm,alpha,backtracks,C_n,nehari_residual.
void write_convergence_csv(std::ostream& out, const RunRecord& run);

struct GradientRelatedReport {
  /// max_n |slope_n + ‖∇_N E‖²| / ‖∇_N E‖²
  double max_slope_defect = 0.0;
  /// max_n |‖ξ_n‖ - ‖∇_N E‖| / ‖∇_N E‖
  double max_norm_defect = 0.0;
  /// max_n ‖R(u_n, α_n ξ_n) - u_n‖_H / ‖α_n ξ_n‖_H
  double retraction_ratio_max = 0.0;
  /// max of ‖u_{n+1} - u_n‖_H over the tail: the steps taken from iterates
  /// with ‖∇_N E‖_H < tail_grad. Empty when the run stops before reaching
  /// that regime.
  double tail_step_max = 0.0;
  int tail_length = 0;
  double last_step = 0.0;
  int steps = 0;
};

GradientRelatedReport diagnostics_gradient_related(const RunRecord& run, double tail_grad);

/// Post-hoc checks of a trace: acceptance inequality at every step and the
/// chain E(u_n) <= C_n <= C_{n-1} <= E(u₀). Empty string when they hold.
std::string verify_line_search_chain(const RunRecord& run, const NmomConfig& cfg, double rel_tol = 1e-12);

}  // namespace nehari
