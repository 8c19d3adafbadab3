#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nehari/model.hpp"
#include "nehari/optimizer.hpp"

namespace nehari {

/// Symmetry thresholds on μ: 1e-5 on the interval, 1e-4 in 2D.
double asymmetry_threshold(DomainKind domain) noexcept;

struct AsymmetryReport {
  double mu = 0.0;
  bool symmetric = true;
  double threshold = 0.0;
};

/// μ = max |u(x) - u(-x)| / max |u| over nodal values.
AsymmetryReport asymmetry_1d(const Discretization& disc, const DiscreteField& u);

/// μ = max_r (max_θ u - min_θ u) / max |u| over the polar grid rings.
AsymmetryReport asymmetry_2d_disk(const Discretization& disc, const DiscreteField& u);

/// Square: largest deviation under the reflections x→-x, y→-y and the swap
/// x↔y, normalized by max |u|.
AsymmetryReport asymmetry_square(const Discretization& disc, const DiscreteField& u);

/// Dispatches on the discretization's domain.
AsymmetryReport asymmetry(const Discretization& disc, const DiscreteField& u);

struct EigenOptions {
  int k = 2;
  /// Extra vectors carried in the block iteration.
  int guard = 4;
  /// Bound on ‖(B - θM)w‖ / ‖Mw‖.
  double tol = 1e-8;
  int max_iter = 2000;
  /// Multiplier of the nonlinear Hessian term; NaN means the model's p.
  double nonlinear_factor = std::numeric_limits<double>::quiet_NaN();
  unsigned seed = 12345;
};

struct EigenCheckResult {
  std::vector<double> theta;      ///< ascending
  std::vector<double> residuals;  ///< ‖(B - θM)w‖ / ‖Mw‖
  int morse_index = 0;            ///< count of θ < 0
  int iterations = 0;
};

/// Smallest k eigenvalues of <E''(u)w, v> = θ (w, v)_H. Because
/// B = M - c N with N positive semidefinite, these are θ = 1 - cν for the
/// largest ν of M⁻¹N, found by block inverse iteration on M⁻¹N with
/// Rayleigh-Ritz deflation. Throws EigenSolveFailure.
EigenCheckResult morse_index_check(const EllipticModel& model, const ManifoldPoint& u_star,
                                   const EigenOptions& options = {});

struct BisectionOptions {
  DomainKind domain = DomainKind::Interval;
  Resolution resolution;
  /// Classification solves stop at ‖∇_N E‖ < 1e-7.
  NmomConfig solver = [] {
    NmomConfig c;
    c.eps_tol = 1e-7;
    return c;
  }();
  double tol = 0.01;
  /// Seed each solve from the last asymmetric solution.
  bool warm_start = true;
};

struct BisectionEvaluation {
  double l = 0.0;
  double mu = 0.0;
  bool asymmetric = false;
  RunStatus status = RunStatus::MaxIter;
  int iterations = 0;
  bool warm = false;
  DiscreteField solution;
};

struct CriticalExponentResult {
  double p = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double l_star = 0.0;
  std::vector<BisectionEvaluation> evaluations;
  int total_iterations = 0;
  /// Evaluations whose solve did not converge.
  int unconverged = 0;

  [[nodiscard]] int n_evals() const noexcept { return static_cast<int>(evaluations.size()); }
};

/// Ground-state asymmetry at one l for the Hénon problem.
BisectionEvaluation evaluate_symmetry(double l, double p, const BisectionOptions& options,
                                      const DiscreteField* seed = nullptr);

/// Bisection on "ground state is asymmetric" until the bracket is at most
/// tol wide. Throws InvalidBracket when the endpoints agree.
CriticalExponentResult bisect_critical_l(double p, double l_lo, double l_hi, const BisectionOptions& options);

struct LawPoint {
  double p = 0.0;
  double l_star = 0.0;
};

struct FitResult {
  enum class Model { InverseLaw, ExpLaw };
  Model model = Model::InverseLaw;
  /// InverseLaw: {k0}. ExpLaw: {k1, k2}.
  std::vector<double> params;
  double mse = 0.0;
};

/// l* ≈ k0 / (p - 1), closed-form least squares. Throws InsufficientData.
FitResult fit_inverse_law(std::span<const LawPoint> points);

/// l* ≈ k1 k2^{-p} / (p - 1): log-linear fit, then Levenberg-Marquardt on the
/// untransformed MSE. Throws InsufficientData, NonPositiveData.
FitResult fit_exp_law(std::span<const LawPoint> points);

double predict(const FitResult& fit, double p);

struct ScalingReport {
  double mu_original = 0.0;
  double mu_transformed = 0.0;
  double amplitude = 0.0;  ///< R^{(l+2)/(p-1)}
  bool invariant = false;
};

/// Compares μ(u) with μ of R^{(l+2)/(p-1)} u(R x) sampled on the rescaled
/// grid R⁻¹Ω.
ScalingReport scaling_symmetry_check(const EllipticProblem& problem, const Discretization& disc,
                                     const DiscreteField& u, double radius_scale);

}  // namespace nehari
