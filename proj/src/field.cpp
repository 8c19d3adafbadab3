#include "nehari/field.hpp"

namespace nehari {

DiscreteField::DiscreteField(std::string mesh_id, Vector coeffs)
    : mesh_id_(std::move(mesh_id)), coeffs_(std::move(coeffs)) {
  if (!coeffs_.allFinite()) {
    throw NehariError(ErrorKind::NonFiniteValue, "field on mesh '" + mesh_id_ + "' has non-finite entries");
  }
}

bool DiscreteField::is_zero() const noexcept {
  return coeffs_.size() == 0 || coeffs_.cwiseAbs().maxCoeff() == 0.0;
}

DiscreteField DiscreteField::with_coeffs(Vector coeffs) const {
  if (coeffs.size() != coeffs_.size()) {
    throw NehariError(ErrorKind::MeshMismatch, "coefficient count does not match mesh '" + mesh_id_ + "'");
  }
  return DiscreteField(mesh_id_, std::move(coeffs));
}

DiscreteField DiscreteField::scaled(double s) const { return DiscreteField(mesh_id_, s * coeffs_); }

void require_same_mesh(const DiscreteField& a, const DiscreteField& b) {
  if (a.mesh_id() != b.mesh_id() || a.size() != b.size()) {
    throw NehariError(ErrorKind::MeshMismatch, "fields on '" + a.mesh_id() + "' and '" + b.mesh_id() + "'");
  }
}

DiscreteField operator+(const DiscreteField& a, const DiscreteField& b) {
  require_same_mesh(a, b);
  return DiscreteField(a.mesh_id(), a.coeffs() + b.coeffs());
}

DiscreteField operator-(const DiscreteField& a, const DiscreteField& b) {
  require_same_mesh(a, b);
  return DiscreteField(a.mesh_id(), a.coeffs() - b.coeffs());
}

}  // namespace nehari
