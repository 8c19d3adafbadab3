#include "nehari/problem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

// First zero of the Bessel function J0.
constexpr double kBesselJ0FirstZero = 2.404825557695772768621631879326;

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(DomainKind kind) noexcept {
  switch (kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Square: return "square";
    case DomainKind::Disk: return "disk";
  }
  return "unknown";
}

DomainKind parse_domain(const std::string& name) {
  if (name == "interval") return DomainKind::Interval;
  if (name == "square") return DomainKind::Square;
  if (name == "disk") return DomainKind::Disk;
  throw NehariError(ErrorKind::ConfigError, "unknown domain '" + name + "' (expected interval, square or disk)");
}

int dimension(DomainKind kind) noexcept { return kind == DomainKind::Interval ? 1 : 2; }

double first_dirichlet_eigenvalue(DomainKind kind) noexcept {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  switch (kind) {
    case DomainKind::Interval: return pi2 / 4.0;
    case DomainKind::Square: return pi2 / 2.0;
    case DomainKind::Disk: return kBesselJ0FirstZero * kBesselJ0FirstZero;
  }
  return 0.0;
}

double PotentialCoefficient::operator()(Point pt) const noexcept {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return lambda;
    case Kind::Radial: return omega * radius_sq(pt) + lambda;
  }
  return 0.0;
}

double PotentialCoefficient::lower_bound() const noexcept {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return lambda;
    case Kind::Radial: return omega >= 0.0 ? lambda : -INFINITY;
  }
  return 0.0;
}

double WeightCoefficient::operator()(Point pt) const noexcept {
  if (kind == Kind::One || l == 0.0) return 1.0;
  const double r2 = radius_sq(pt);
  if (r2 == 0.0) return 0.0;
  return std::pow(r2, 0.5 * l);
}

void EllipticProblem::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw NehariError(ErrorKind::InvalidCoefficient, "exponent p must exceed 1, got " + format_value(p));
  }
  if (g.kind == WeightCoefficient::Kind::RadialPower && !(g.l >= 0.0)) {
    throw NehariError(ErrorKind::InvalidCoefficient, "weight exponent l must be >= 0, got " + format_value(g.l));
  }
  const double lambda1 = first_dirichlet_eigenvalue(domain);
  if (!(a.lower_bound() > -lambda1)) {
    throw NehariError(ErrorKind::InvalidCoefficient,
                      "potential lower bound " + format_value(a.lower_bound()) + " must exceed -lambda1 = " +
                          format_value(-lambda1) + " on the " + to_string(domain));
  }
}

EllipticProblem preset_nls(double omega, double lambda, DomainKind domain) {
  if (!(omega > 0.0)) {
    throw NehariError(ErrorKind::InvalidCoefficient, "NLS requires omega > 0, got " + format_value(omega));
  }
  EllipticProblem problem;
  problem.name = "nls";
  problem.domain = domain;
  problem.a = PotentialCoefficient::radial(omega, lambda);
  problem.g = WeightCoefficient::one();
  problem.p = 3.0;
  problem.validate();
  return problem;
}

EllipticProblem preset_henon(double l, double p, DomainKind domain) {
  EllipticProblem problem;
  problem.name = "henon";
  problem.domain = domain;
  problem.a = PotentialCoefficient::zero();
  problem.g = WeightCoefficient::radial_power(l);
  problem.p = p;
  problem.validate();
  return problem;
}

}  // namespace nehari
