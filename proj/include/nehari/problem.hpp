#pragma once

#include <string>

namespace nehari {

enum class DomainKind { Interval, Square, Disk };

const char* to_string(DomainKind kind) noexcept;
DomainKind parse_domain(const std::string& name);

int dimension(DomainKind kind) noexcept;

/// Closed-form first Dirichlet eigenvalue of -Δ: π²/4 on (-1,1), π²/2 on
/// (-1,1)², j₀,₁² on the unit disk.
double first_dirichlet_eigenvalue(DomainKind kind) noexcept;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double radius_sq(Point pt) noexcept { return pt.x * pt.x + pt.y * pt.y; }

/// Linear potential a(x): zero, a constant, or ω|x|² + λ.
struct PotentialCoefficient {
  enum class Kind { Zero, Constant, Radial };

  Kind kind = Kind::Zero;
  double omega = 0.0;
  double lambda = 0.0;

  static PotentialCoefficient zero() { return {}; }
  static PotentialCoefficient constant(double value) { return {Kind::Constant, 0.0, value}; }
  static PotentialCoefficient radial(double omega, double lambda) { return {Kind::Radial, omega, lambda}; }

  [[nodiscard]] double operator()(Point pt) const noexcept;
  [[nodiscard]] bool is_zero() const noexcept {
    return kind == Kind::Zero || (omega == 0.0 && lambda == 0.0);
  }
  /// inf over the domain; the radial form attains it at the origin.
  [[nodiscard]] double lower_bound() const noexcept;
};

/// Nonlinearity weight g(x): 1 or |x|^l.
struct WeightCoefficient {
  enum class Kind { One, RadialPower };

  Kind kind = Kind::One;
  double l = 0.0;

  static WeightCoefficient one() { return {}; }
  static WeightCoefficient radial_power(double l) { return {Kind::RadialPower, l}; }

  [[nodiscard]] double operator()(Point pt) const noexcept;
};

/// -Δu + a(x)u - g(x)|u|^{p-1}u = 0 in Ω, u = 0 on ∂Ω.
struct EllipticProblem {
  std::string name = "custom";
  DomainKind domain = DomainKind::Interval;
  PotentialCoefficient a;
  WeightCoefficient g;
  double p = 3.0;

  /// Throws InvalidCoefficient on p <= 1, negative l, or a below -λ₁.
  void validate() const;

  /// Hénon exponent l (0 for the NLS preset).
  [[nodiscard]] double weight_exponent() const noexcept {
    return g.kind == WeightCoefficient::Kind::RadialPower ? g.l : 0.0;
  }
};

/// Stationary NLS: a = ω|x|² + λ, g = 1, p = 3.
EllipticProblem preset_nls(double omega, double lambda, DomainKind domain);

/// Hénon: a = 0, g = |x|^l.
EllipticProblem preset_henon(double l, double p, DomainKind domain);

}  // namespace nehari
