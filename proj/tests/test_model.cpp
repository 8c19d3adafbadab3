#include <gtest/gtest.h>

#include "support.hpp"

namespace nehari {
namespace {

using test::kPi;

DiscreteField sine(const EllipticModel& m) {
  return m.discretization().interpolate([](Point p) { return std::sin(kPi * p.x); });
}

TEST(Model, SineAnalyticValues) {
  const auto m = test::cubic_interval();
  const DiscreteField u = sine(*m);
  // ∫u'² = π², ∫u⁴ = 3/4 on (-1, 1).
  EXPECT_NEAR(nehari_residual(*m, u), kPi * kPi - 0.75, 1e-4);
  EXPECT_NEAR(nehari_scale(*m, u), 2.0 * kPi / std::sqrt(3.0), 1e-4);
  EXPECT_NEAR(m->energy(u), kPi * kPi / 2.0 - 0.75 / 4.0, 1e-4);
}

TEST(Model, SineQuarticAgainstOracle) {
  const auto m = test::cubic_interval(200);
  const double ref = test::reference_integral([](double x) { return std::pow(std::sin(kPi * x), 4); }, -1, 1);
  EXPECT_NEAR(ref, 0.75, 1e-13);
  EXPECT_NEAR(m->nonlinear_integral(sine(*m), 4.0), ref, 1e-3);
}

TEST(Model, ZeroField) {
  const auto m = test::cubic_interval(50);
  const DiscreteField z = m->make_field(Vector::Zero(49));
  const DiscreteField v = test::random_field(m->discretization(), 1);
  EXPECT_EQ(m->energy(z), 0.0);
  EXPECT_EQ(m->apply_derivative(z, v), 0.0);
  const GradientPair h = m->h_gradients(z);
  EXPECT_TRUE(h.grad_E.is_zero());
  EXPECT_TRUE(h.grad_G.is_zero());
  EXPECT_THROW((void)nehari_residual(*m, z), NehariError);
}

std::vector<std::shared_ptr<const EllipticModel>> instances() {
  const Resolution r = test::small_2d();
  Resolution r1;
  r1.n_elements = 200;
  return {make_model(preset_henon(1.0, 3.0, DomainKind::Interval), r1),
          make_model(preset_nls(4.0, 10.0, DomainKind::Interval), r1),
          make_model(preset_henon(0.0, 2.5, DomainKind::Interval), r1),
          make_model(preset_nls(4.0, 10.0, DomainKind::Square), r),
          make_model(preset_henon(1.0, 3.0, DomainKind::Disk), r)};
}

TEST(Model, DerivativeMatchesCentralDifference) {
  for (const auto& m : instances()) {
    const DiscreteField u = m->initial_guess();
    for (unsigned i = 0; i < 5; ++i) {
      const DiscreteField v = test::random_field(m->discretization(), 500 + i);
      const DiscreteField vs = v.scaled(1.0 / m->norm(v));
      const double h = 1e-4 * m->norm(u);
      const double fd = (m->energy(u + vs.scaled(h)) - m->energy(u - vs.scaled(h))) / (2 * h);
      const double ex = m->apply_derivative(u, vs);
      EXPECT_NEAR(fd, ex, 1e-6 * (std::abs(ex) + m->norm(m->h_gradients(u).grad_E))) << m->mesh_id();
    }
  }
}

TEST(Model, HessianMatchesDerivativeDifference) {
  for (const auto& m : instances()) {
    const DiscreteField u = m->initial_guess();
    for (unsigned s = 0; s < 5; ++s) {
      DiscreteField w = test::random_field(m->discretization(), 100 + s);
      DiscreteField v = test::random_field(m->discretization(), 200 + s);
      w = w.scaled(1.0 / m->norm(w));
      v = v.scaled(1.0 / m->norm(v));
      const double h = 1e-4 * m->norm(u);
      const double fd = (m->apply_derivative(u + w.scaled(h), v) - m->apply_derivative(u - w.scaled(h), v)) / (2 * h);
      const double ex = m->apply_hessian(u, w, v);
      EXPECT_NEAR(fd, ex, 1e-5 * std::max(1.0, std::abs(ex))) << m->mesh_id();
      EXPECT_NEAR(m->apply_hessian(u, w, v), m->apply_hessian(u, v, w), 1e-12 * std::max(1.0, std::abs(ex)));
    }
  }
}

TEST(Model, HessianOnManifoldDirection) {
  for (const auto& m : instances()) {
    const ManifoldPoint u = scale_to_manifold(*m, m->initial_guess());
    const double p = m->exponent();
    const double expected = (1.0 - p) * m->nonlinear_integral(u.field, p + 1.0);
    EXPECT_LT(expected, 0.0);
    EXPECT_NEAR(m->apply_hessian(u.field, u.field, u.field), expected, 1e-9 * std::abs(expected));
  }
}

TEST(Model, DerivativeAlongSelfIsNehariResidual) {
  for (const auto& m : instances()) {
    const DiscreteField u = test::random_field(m->discretization(), 9);
    EXPECT_DOUBLE_EQ(m->apply_derivative(u, u), nehari_residual(*m, u));
  }
}

TEST(Model, RieszConsistency) {
  for (const auto& m : instances()) {
    const DiscreteField u = m->initial_guess();
    const GradientPair g = m->h_gradients(u);
    const double p = m->exponent();
    for (unsigned s = 0; s < 5; ++s) {
      const DiscreteField v = test::random_field(m->discretization(), 300 + s);
      const double scale = m->norm(u) * m->norm(v);
      const double tol = 10.0 * m->options().linear.tolerance * scale + 1e-13 * scale;
      EXPECT_NEAR(m->inner(g.grad_E, v), m->apply_derivative(u, v), tol) << m->mesh_id();
      // <G'(u), v> = 2(u, v)_H - (p+1) ∫g|u|^{p-1}uv.
      const double dG = 2.0 * m->inner(u, v) - (p + 1.0) * m->nonlinear_load(u).dot(v.coeffs());
      EXPECT_NEAR(m->inner(g.grad_G, v), dG, (p + 1.0) * tol) << m->mesh_id();
    }
  }
}

TEST(Model, GradientLinearIdentity) {
  for (const auto& m : instances()) {
    const DiscreteField u = m->initial_guess();
    const GradientPair g = m->h_gradients(u);
    const double p = m->exponent();
    const Vector lhs = (p + 1.0) * g.grad_E.coeffs() - g.grad_G.coeffs();
    const Vector rhs = (p - 1.0) * u.coeffs();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + g.grad_E.coeffs().cwiseAbs().maxCoeff() * (p + 1.0)));
  }
}

TEST(Model, EnergyOnManifold) {
  for (const auto& m : instances()) {
    const ManifoldPoint u = scale_to_manifold(*m, m->initial_guess());
    const double p = m->exponent();
    const double n2 = m->inner(u.field, u.field);
    EXPECT_NEAR(u.energy, (0.5 - 1.0 / (p + 1.0)) * n2, 1e-10 * n2);
    // G(2u) = 4‖u‖² - 2^{p+1} ∫g|u|^{p+1}.
    const double g2 = nehari_residual(*m, u.field.scaled(2.0));
    EXPECT_NEAR(g2, (4.0 - std::pow(2.0, p + 1.0)) * n2, 1e-9 * n2);
  }
}

TEST(Model, DomainMismatchRejected) {
  const auto disc = make_discretization(DomainKind::Square, test::small_2d());
  EXPECT_THROW(EllipticModel(preset_henon(1, 3, DomainKind::Disk), disc), NehariError);
  const auto m = test::cubic_interval(20);
  const DiscreteField other("interval 21", Vector::Ones(20));
  EXPECT_THROW((void)m->energy(other), NehariError);
}

}  // namespace
}  // namespace nehari
