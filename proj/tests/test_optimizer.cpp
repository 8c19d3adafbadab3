#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

namespace nehari {
namespace {

TEST(Nonmonotone, Recursion) {
  const NonmonotoneState s0 = NonmonotoneState::initial(10.0);
  const NonmonotoneState a = update_nonmonotone(s0, 8.0, 0.0);
  EXPECT_EQ(a.c_n, 8.0);
  EXPECT_EQ(a.q_n, 1.0);
  const NonmonotoneState b = update_nonmonotone(s0, 8.0, 0.85);
  EXPECT_DOUBLE_EQ(b.q_n, 1.85);
  EXPECT_DOUBLE_EQ(b.c_n, (0.85 * 10.0 + 8.0) / 1.85);
  EXPECT_NEAR(b.c_n, 8.9189, 5e-5);
}

TEST(Nonmonotone, ConvexCombination) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> rho(0.0, 0.99);
  NonmonotoneState s = NonmonotoneState::initial(u(rng));
  for (int i = 0; i < 200; ++i) {
    const double e = u(rng);
    const NonmonotoneState next = update_nonmonotone(s, e, rho(rng));
    EXPECT_GE(next.c_n, std::min(s.c_n, e) - 1e-15);
    EXPECT_LE(next.c_n, std::max(s.c_n, e) + 1e-15);
    EXPECT_GE(next.q_n, 1.0);
    s = next;
  }
}

TEST(BarzilaiBorwein, TrialSteps) {
  const NmomConfig cfg;
  EXPECT_EQ(bb_trial_step(0, {}, cfg), 1.0);
  EXPECT_EQ(bb_trial_step(1, {2.0, 2.0, 2.0}, cfg), 1.0);
  EXPECT_EQ(bb_trial_step(1, {1.0, 0.0, 1.0}, cfg), 10.0);
  EXPECT_EQ(bb_trial_step(2, {1.0, 0.0, 0.0}, cfg), 10.0);
  EXPECT_DOUBLE_EQ(bb_trial_step(3, {6.0, -2.0, 1.0}, cfg), 3.0);
  EXPECT_DOUBLE_EQ(bb_trial_step(4, {6.0, 10.0, 2.0}, cfg), 5.0);
  EXPECT_EQ(bb_trial_step(4, {6.0, 100.0, 2.0}, cfg), 10.0);
  EXPECT_EQ(bb_trial_step(3, {0.1, 1.0, 1.0}, cfg), 1.0);
}

TEST(Config, Validation) {
  NmomConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.beta = 1.5;
  try {
    cfg.validate();
    FAIL();
  } catch (const NehariError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find("optimizer.beta"), std::string::npos);
  }
  cfg = {};
  cfg.alpha_max = 0.5;
  EXPECT_THROW(cfg.validate(), NehariError);
  cfg = {};
  cfg.rho = 1.0;
  EXPECT_THROW(cfg.validate(), NehariError);
}

std::shared_ptr<const EllipticModel> henon(double l, double p = 3.0) {
  return make_model(preset_henon(l, p, DomainKind::Interval), Resolution{});
}

TEST(Backtracking, FirstStepAccepted) {
  const auto m = henon(0.0);
  const NmomConfig cfg;
  const ManifoldPoint u = scale_to_manifold(*m, m->initial_guess());
  const RiemannianGradient rg = riemannian_gradient(*m, u);
  const TangentVector xi{u.field, rg.grad.dir.scaled(-1.0)};
  const double slope = m->inner(rg.grad.dir, xi.dir);
  const NonmonotoneState state = NonmonotoneState::initial(u.energy);
  const LineSearchResult ls = backtracking_search(*m, u, xi, slope, state, 1.0, cfg);
  EXPECT_GT(ls.alpha, 0.0);
  EXPECT_LE(ls.alpha, 10.0);
  EXPECT_LE(ls.next.energy, state.c_n + cfg.sigma * ls.alpha * slope);
  EXPECT_LE(ls.backtracks, cfg.max_backtracks);
  std::printf("first step: alpha=%.6g backtracks=%d\n", ls.alpha, ls.backtracks);

  try {
    (void)backtracking_search(*m, u, {u.field, rg.grad.dir}, -slope, state, 1.0, cfg);
    FAIL();
  } catch (const NehariError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LineSearchFailure);
  }
}

TEST(Backtracking, NoBudgetFails) {
  const auto m = henon(0.0);
  NmomConfig cfg;
  cfg.max_backtracks = 0;
  const ManifoldPoint u = scale_to_manifold(*m, m->initial_guess());
  const RiemannianGradient rg = riemannian_gradient(*m, u);
  const TangentVector xi{u.field, rg.grad.dir.scaled(-1.0)};
  // An unattainable decrease demand.
  EXPECT_THROW((void)backtracking_search(*m, u, xi, -1e30, NonmonotoneState::initial(u.energy), 1.0, cfg),
               NehariError);
}

TEST(Nmom, HenonSymmetricBelowThreshold) {
  const auto m = henon(1.0);
  const NmomConfig cfg;
  const RunRecord run = nmom_run(*m, m->initial_guess(), cfg);
  EXPECT_EQ(run.status, RunStatus::Converged);
  EXPECT_LT(run.final_grad_norm, cfg.eps_tol);
  EXPECT_LT(asymmetry_1d(m->discretization(), run.solution.field).mu, 1e-5);
  EXPECT_EQ(verify_line_search_chain(run, cfg), "");
  EXPECT_EQ(run.trace.back().alpha, 0.0);
  EXPECT_EQ(run.iterations(), static_cast<int>(run.trace.size()) - 1);
}

TEST(Nmom, HenonAsymmetricAboveThreshold) {
  const auto m = henon(2.0);
  const RunRecord run = nmom_run(*m, m->initial_guess(), NmomConfig{});
  EXPECT_EQ(run.status, RunStatus::Converged);
  EXPECT_GT(asymmetry_1d(m->discretization(), run.solution.field).mu, 1e-5);
  const Vector& c = run.solution.field.coeffs();
  Eigen::Index arg = 0;
  c.cwiseAbs().maxCoeff(&arg);
  const double x_peak = m->discretization().nodes()[static_cast<std::size_t>(arg)].x;
  EXPECT_GT(std::abs(x_peak), 0.1);
}

TEST(Nmom, MonotoneWhenRhoZero) {
  const auto m = henon(1.0);
  NmomConfig cfg;
  cfg.rho = 0.0;
  const RunRecord run = nmom_run(*m, m->initial_guess(), cfg);
  EXPECT_EQ(run.status, RunStatus::Converged);
  for (std::size_t n = 1; n < run.trace.size(); ++n) {
    EXPECT_LE(run.trace[n].energy, run.trace[n - 1].energy);
    // Armijo against the last energy.
    const auto& prev = run.trace[n - 1];
    EXPECT_LE(run.trace[n].energy, prev.energy + cfg.sigma * prev.alpha * prev.slope + 1e-12 * prev.energy);
  }
}

TEST(Nmom, IterationLimit) {
  const auto m = henon(1.0);
  NmomConfig cfg;
  cfg.max_iter = 3;
  const RunRecord run = nmom_run(*m, m->initial_guess(), cfg);
  EXPECT_EQ(run.status, RunStatus::MaxIter);
  EXPECT_EQ(run.iterations(), 3);
}

TEST(Nmom, SteepestDescentDiagnostics) {
  const auto m = henon(0.0);
  const NmomConfig cfg;
  const RunRecord run = nmom_run(*m, m->initial_guess(), cfg);
  const GradientRelatedReport r = diagnostics_gradient_related(run, 10 * cfg.eps_tol);
  EXPECT_LT(r.max_slope_defect, 1e-12);
  EXPECT_LT(r.max_norm_defect, 1e-12);
  EXPECT_TRUE(std::isfinite(r.retraction_ratio_max));
  EXPECT_GT(r.retraction_ratio_max, 0.0);
  EXPECT_LT(r.tail_step_max, 1e-4);
  EXPECT_GE(r.tail_length, 1);
}

TEST(Nmom, ConvergenceCsv) {
  const auto m = henon(0.0);
  const RunRecord run = nmom_run(*m, m->initial_guess(), NmomConfig{});
  std::ostringstream out;
  write_convergence_csv(out, run);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,energy,grad_norm,alpha,backtracks,C_n,nehari_residual");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(run.trace.size()));
}

TEST(Nmom, ChainVerifierDetectsViolation) {
  const auto m = henon(0.0);
  const NmomConfig cfg;
  RunRecord run = nmom_run(*m, m->initial_guess(), cfg);
  ASSERT_GE(run.trace.size(), 3u);
  run.trace[2].energy = run.trace[2].c_n + 1.0;
  EXPECT_NE(verify_line_search_chain(run, cfg), "");
}

}  // namespace
}  // namespace nehari
