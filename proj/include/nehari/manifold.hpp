#pragma once

#include "nehari/functional.hpp"

namespace nehari {

struct ManifoldTolerances {
  /// |G(u)| <= nehari * ‖u‖²_H for points on N.
  double nehari = 1e-8;
  /// |(∇G(u), ξ)_H| <= tangency * (1 + ‖∇G(u)‖_H ‖ξ‖_H) for tangent vectors.
  double tangency = 1e-8;
  /// ‖∇G(u)‖_H below this is treated as a degenerate constraint.
  double degenerate_gradient = 1e-14;
};

/// A point of the Nehari manifold with its energy and residual. The cached
/// values are recomputed from the field on construction, never updated.
struct ManifoldPoint {
  DiscreteField field;
  double nehari_residual = 0.0;
  double energy = 0.0;
  double norm_sq = 0.0;
};

/// ξ in the tangent space at base.
struct TangentVector {
  DiscreteField base;
  DiscreteField dir;
};

/// G(u) = <E'(u), u>. Throws ZeroField.
double nehari_residual(const NehariFunctional& f, const DiscreteField& u);

/// Builds the point and checks |G(u)| against the tolerance; throws
/// NotOnManifold if the field is off N.
ManifoldPoint make_manifold_point(const NehariFunctional& f, DiscreteField u, const ManifoldTolerances& tol = {});

/// ρ(v) with ρ(v) v on N. Throws ZeroField or DegenerateDirection.
double nehari_scale(const NehariFunctional& f, const DiscreteField& v);

/// ρ(v) v as a manifold point.
ManifoldPoint scale_to_manifold(const NehariFunctional& f, const DiscreteField& v, const ManifoldTolerances& tol = {});

/// P_u φ = φ - (∇G, φ)_H / ‖∇G‖²_H ∇G with a precomputed ∇G(u).
TangentVector project_tangent(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& phi,
                              const DiscreteField& grad_G, const ManifoldTolerances& tol = {});

/// Same, computing ∇G(u) with one linear solve.
TangentVector project_tangent(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& phi,
                              const ManifoldTolerances& tol = {});

/// Riemannian gradient together with the H-gradients it came from.
struct RiemannianGradient {
  TangentVector grad;
  GradientPair h;
  double norm = 0.0;
};

/// ∇_N E(u) = P_u ∇E(u).
RiemannianGradient riemannian_gradient(const NehariFunctional& f, const ManifoldPoint& u,
                                       const ManifoldTolerances& tol = {});

/// R_u(ξ) = ρ(u + ξ)(u + ξ); returns u itself for ξ = 0.
ManifoldPoint retract(const NehariFunctional& f, const ManifoldPoint& u, const TangentVector& xi,
                      const ManifoldTolerances& tol = {});

/// R_u(s ξ) for a scalar step.
ManifoldPoint retract(const NehariFunctional& f, const ManifoldPoint& u, const DiscreteField& dir, double step,
                      const ManifoldTolerances& tol = {});

}  // namespace nehari
