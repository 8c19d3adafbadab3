#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nehari/discretization.hpp"
#include "nehari/functional.hpp"
#include "nehari/problem.hpp"

namespace nehari {

struct ModelOptions {
  LinearSolverOptions linear;
  /// nehari_scale refuses directions whose ∫g|v|^{p+1} falls below this.
  double degenerate_floor = 1e-300;
};

/// Default relative residual for the H-solve: tight for the direct 1D and
/// polar solvers, 1e-10 for conjugate gradients.
LinearSolverOptions default_linear_options(DomainKind domain);

/// E(u) = ½‖u‖²_H - 1/(p+1) ∫ g|u|^{p+1} on a concrete discretization.
class EllipticModel final : public NehariFunctional {
 public:
  EllipticModel(EllipticProblem problem, std::shared_ptr<const Discretization> disc, ModelOptions options = {});

  [[nodiscard]] const EllipticProblem& problem() const noexcept { return problem_; }
  [[nodiscard]] const Discretization& discretization() const noexcept { return *disc_; }
  [[nodiscard]] std::shared_ptr<const Discretization> discretization_ptr() const noexcept { return disc_; }
  [[nodiscard]] const HOperator& h_operator() const noexcept { return *op_; }
  [[nodiscard]] const ModelOptions& options() const noexcept { return options_; }
  [[nodiscard]] double exponent() const noexcept { return problem_.p; }

  [[nodiscard]] std::string mesh_id() const override { return disc_->mesh_id(); }
  [[nodiscard]] double energy(const DiscreteField& u) const override;
  [[nodiscard]] double apply_derivative(const DiscreteField& u, const DiscreteField& v) const override;
  [[nodiscard]] double inner(const DiscreteField& u, const DiscreteField& v) const override;
  [[nodiscard]] GradientPair h_gradients(const DiscreteField& u) const override;
  [[nodiscard]] double manifold_scale(const DiscreteField& v) const override;

  /// <E''(u) w, v> = (w, v)_H - p ∫ g|u|^{p-1} w v.
  [[nodiscard]] double apply_hessian(const DiscreteField& u, const DiscreteField& w, const DiscreteField& v) const;

  /// ∫ g|u|^q dx with the nonlinear Gauss rule.
  [[nodiscard]] double nonlinear_integral(const DiscreteField& u, double q) const;
  /// Load vector of g|u|^{p-1}u.
  [[nodiscard]] Vector nonlinear_load(const DiscreteField& u) const;
  /// Vector of ∫ g|u|^{p-1} w φ_i.
  [[nodiscard]] Vector nonlinear_weighted_apply(const DiscreteField& u, const Vector& w) const;

  /// ψ with -Δψ + aψ = g|u|^{p-1}u in weak form.
  [[nodiscard]] DiscreteField solve_potential(const DiscreteField& u) const;

  [[nodiscard]] DiscreteField make_field(Vector coeffs) const { return disc_->make_field(std::move(coeffs)); }
  [[nodiscard]] DiscreteField initial_guess() const { return sample_initial_guess(*disc_); }

 private:
  void check(const DiscreteField& u) const;

  EllipticProblem problem_;
  std::shared_ptr<const Discretization> disc_;
  ModelOptions options_;
  std::unique_ptr<HOperator> op_;
  QuadratureTable table_;
  std::vector<double> g_weighted_;
};

/// Convenience: validate, discretize, assemble.
std::shared_ptr<const EllipticModel> make_model(const EllipticProblem& problem, const Resolution& res,
                                                std::optional<LinearSolverOptions> linear = std::nullopt);

}  // namespace nehari
