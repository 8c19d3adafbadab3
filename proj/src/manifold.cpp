#include "nehari/manifold.hpp"

#include <cmath>
#include <cstdio>

namespace nehari {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

double nehari_residual(const NehariFunctional& f, const DiscreteField& u) {
  if (u.is_zero()) throw NehariError(ErrorKind::ZeroField, "Nehari residual of the zero field");
  return f.apply_derivative(u, u);
}

ManifoldPoint make_manifold_point(const NehariFunctional& f, DiscreteField u, const ManifoldTolerances& tol) {
  ManifoldPoint pt;
  pt.nehari_residual = nehari_residual(f, u);
  pt.norm_sq = f.inner(u, u);
  pt.energy = f.energy(u);
  if (!(std::abs(pt.nehari_residual) <= tol.nehari * pt.norm_sq)) {
    throw NehariError(ErrorKind::NotOnManifold, "|G(u)| = " + sci(std::abs(pt.nehari_residual)) +
                                                    " exceeds tolerance for ‖u‖² = " + sci(pt.norm_sq));
  }
  pt.field = std::move(u);
  return pt;
}

double nehari_scale(const NehariFunctional& f, const DiscreteField& v) {
  if (v.is_zero()) throw NehariError(ErrorKind::ZeroField, "cannot scale the zero field onto the manifold");
  return f.manifold_scale(v);
}

ManifoldPoint scale_to_manifold(const NehariFunctional& f, const DiscreteField& v, const ManifoldTolerances& tol) {
  return make_manifold_point(f, v.scaled(nehari_scale(f, v)), tol);
}

TangentVector project_tangent(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& phi,
                              const DiscreteField& grad_G, const ManifoldTolerances& tol) {
  require_same_mesh(u.field, phi);
  const double gg = f.inner(grad_G, grad_G);
  if (!(std::sqrt(gg) > tol.degenerate_gradient)) {
    throw NehariError(ErrorKind::DegenerateConstraintGradient, "‖∇G(u)‖_H = " + sci(std::sqrt(gg)));
  }
  const double coeff = f.inner(grad_G, phi) / gg;
  return {u.field, phi.with_coeffs(phi.coeffs() - coeff * grad_G.coeffs())};
}

TangentVector project_tangent(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& phi,
                              const ManifoldTolerances& tol) {
  return project_tangent(f, u, phi, f.h_gradients(u.field).grad_G, tol);
}

RiemannianGradient riemannian_gradient(const NehariFunctional& f, const ManifoldPoint& u,
                                       const ManifoldTolerances& tol) {
  RiemannianGradient out{{}, f.h_gradients(u.field), 0.0};
  out.grad = project_tangent(f, u, out.h.grad_E, out.h.grad_G, tol);
  out.norm = f.norm(out.grad.dir);
  return out;
}

ManifoldPoint retract(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& dir, double step,
                      const ManifoldTolerances& tol) {
  require_same_mesh(u.field, dir);
  if (step == 0.0 || dir.is_zero()) return u;
  return scale_to_manifold(f, u.field.with_coeffs(u.field.coeffs() + step * dir.coeffs()), tol);
}

ManifoldPoint retract(const NehariFunctional& f, const ManifoldPoint& u, const TangentVector& xi,
                      const ManifoldTolerances& tol) {
  return retract(f, u, xi.dir, 1.0, tol);
}

}  // namespace nehari
