#pragma once

#include <string>
#include <utility>

#include <Eigen/Core>

#include "nehari/errors.hpp"

namespace nehari {

using Vector = Eigen::VectorXd;

/// Coefficients of a discrete function in H = H^1_0, tagged with the mesh
/// that gives them meaning. Immutable once built; entries are always finite.
class DiscreteField {
 public:
  DiscreteField() = default;
  DiscreteField(std::string mesh_id, Vector coeffs);

  [[nodiscard]] const Vector& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] const std::string& mesh_id() const noexcept { return mesh_id_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return coeffs_.size(); }
  [[nodiscard]] bool is_zero() const noexcept;

  /// Same mesh, new coefficients.
  [[nodiscard]] DiscreteField with_coeffs(Vector coeffs) const;

  [[nodiscard]] DiscreteField scaled(double s) const;

 private:
  std::string mesh_id_;
  Vector coeffs_;
};

DiscreteField operator+(const DiscreteField& a, const DiscreteField& b);
DiscreteField operator-(const DiscreteField& a, const DiscreteField& b);

/// Throws MeshMismatch when the two fields live on different meshes.
void require_same_mesh(const DiscreteField& a, const DiscreteField& b);

}  // namespace nehari
