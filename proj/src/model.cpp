#include "nehari/model.hpp"

#include <cmath>

namespace nehari {

double NehariFunctional::norm(const DiscreteField& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

LinearSolverOptions default_linear_options(DomainKind domain) {
  LinearSolverOptions opts;
  opts.tolerance = domain == DomainKind::Square ? 1e-10 : 1e-12;
  return opts;
}

EllipticModel::EllipticModel(EllipticProblem problem, std::shared_ptr<const Discretization> disc, ModelOptions options)
    : problem_(std::move(problem)), disc_(std::move(disc)), options_(options) {
  problem_.validate();
  if (disc_->domain() != problem_.domain) {
    throw NehariError(ErrorKind::MeshMismatch, std::string("problem on the ") + to_string(problem_.domain) +
                                                   " discretized on a " + to_string(disc_->domain()) + " mesh");
  }
  op_ = disc_->assemble(problem_.a, options_.linear);
  table_ = disc_->quadrature(nonlinear_gauss_points(problem_.p));
  g_weighted_.resize(table_.size());
  for (std::size_t q = 0; q < table_.size(); ++q) g_weighted_[q] = table_.weight[q] * problem_.g(table_.point[q]);
}

void EllipticModel::check(const DiscreteField& u) const {
  if (u.size() != disc_->dof_count() || u.mesh_id() != disc_->mesh_id()) {
    throw NehariError(ErrorKind::MeshMismatch, "field on '" + u.mesh_id() + "' used with '" + disc_->mesh_id() + "'");
  }
}

double EllipticModel::nonlinear_integral(const DiscreteField& u, double q) const {
  check(u);
  return nehari::nonlinear_integral(table_, g_weighted_, u.coeffs(), q);
}

Vector EllipticModel::nonlinear_load(const DiscreteField& u) const {
  check(u);
  return nehari::nonlinear_load(table_, g_weighted_, u.coeffs(), problem_.p);
}

Vector EllipticModel::nonlinear_weighted_apply(const DiscreteField& u, const Vector& w) const {
  check(u);
  return nehari::nonlinear_weighted_apply(table_, g_weighted_, u.coeffs(), problem_.p, w);
}

double EllipticModel::inner(const DiscreteField& u, const DiscreteField& v) const {
  check(u);
  check(v);
  return op_->inner(u.coeffs(), v.coeffs());
}

double EllipticModel::energy(const DiscreteField& u) const {
  const double p = problem_.p;
  return 0.5 * inner(u, u) - nonlinear_integral(u, p + 1.0) / (p + 1.0);
}

double EllipticModel::apply_derivative(const DiscreteField& u, const DiscreteField& v) const {
  check(v);
  return inner(u, v) - nonlinear_load(u).dot(v.coeffs());
}

double EllipticModel::apply_hessian(const DiscreteField& u, const DiscreteField& w, const DiscreteField& v) const {
  check(w);
  check(v);
  return inner(w, v) - problem_.p * nonlinear_weighted_apply(u, w.coeffs()).dot(v.coeffs());
}

DiscreteField EllipticModel::solve_potential(const DiscreteField& u) const {
  return make_field(op_->solve(nonlinear_load(u)));
}

GradientPair EllipticModel::h_gradients(const DiscreteField& u) const {
  const Vector psi = solve_potential(u).coeffs();
  const double p = problem_.p;
  return {u.with_coeffs(u.coeffs() - psi), u.with_coeffs(2.0 * u.coeffs() - (p + 1.0) * psi)};
}

double EllipticModel::manifold_scale(const DiscreteField& v) const {
  const double p = problem_.p;
  const double integral = nonlinear_integral(v, p + 1.0);
  if (!(integral >= options_.degenerate_floor)) {
    throw NehariError(ErrorKind::DegenerateDirection,
                      "nonlinear integral of the direction is below the degenerate floor");
  }
  const double norm_sq = inner(v, v);
  const double s = std::pow(norm_sq / integral, 1.0 / (p - 1.0));
  if (!std::isfinite(s) || !(s > 0.0)) {
    throw NehariError(ErrorKind::DegenerateDirection, "scaling factor is not a positive finite number");
  }
  return s;
}

std::shared_ptr<const EllipticModel> make_model(const EllipticProblem& problem, const Resolution& res,
                                                std::optional<LinearSolverOptions> linear) {
  ModelOptions options;
  options.linear = linear.value_or(default_linear_options(problem.domain));
  return std::make_shared<EllipticModel>(problem, make_discretization(problem.domain, res), options);
}

}  // namespace nehari
