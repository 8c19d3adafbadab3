#pragma once

#include <string>

#include "nehari/field.hpp"

namespace nehari {

/// H-gradients ∇E(u) and ∇G(u) of the energy and of the Nehari functional
/// G(u) = <E'(u), u>.
struct GradientPair {
  DiscreteField grad_E;
  DiscreteField grad_G;
};

/// What the manifold geometry needs from an energy: E, its derivative, the
/// H-inner product, the two H-gradients, and the scaling map onto the
/// Nehari manifold.
class NehariFunctional {
 public:
  virtual ~NehariFunctional() = default;

  [[nodiscard]] virtual std::string mesh_id() const = 0;
  [[nodiscard]] virtual double energy(const DiscreteField& u) const = 0;
  /// <E'(u), v>
  [[nodiscard]] virtual double apply_derivative(const DiscreteField& u, const DiscreteField& v) const = 0;
  [[nodiscard]] virtual double inner(const DiscreteField& u, const DiscreteField& v) const = 0;
  [[nodiscard]] virtual GradientPair h_gradients(const DiscreteField& u) const = 0;
  /// The s > 0 with <E'(s v), v> = 0. Throws DegenerateDirection.
  [[nodiscard]] virtual double manifold_scale(const DiscreteField& v) const = 0;

  [[nodiscard]] double norm(const DiscreteField& u) const;
};

}  // namespace nehari
