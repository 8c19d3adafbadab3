// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "nehari/cli.hpp"
#include "support.hpp"

using namespace nehari;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Solved {
  std::string name;
  std::shared_ptr<const EllipticModel> model;
  RunRecord run;
};

// Every converged run of the suite, reused by criteria 2, 4 and 12.
std::deque<Solved> runs;

const Solved& solve(const std::string& name, const EllipticProblem& problem, const Resolution& res,
                    const NmomConfig& cfg = {}) {
  auto model = make_model(problem, res);
  RunRecord run = nmom_run(*model, model->initial_guess(), cfg);
  runs.push_back({name, model, std::move(run)});
  return runs.back();
}

double peak(const DiscreteField& u) { return u.coeffs().cwiseAbs().maxCoeff(); }

void criterion_1() {
  const auto t0 = Clock::now();
  const Solved& s = solve("henon1d p=3 l=1", preset_henon(1.0, 3.0, DomainKind::Interval), Resolution{});
  const double dt = seconds_since(t0);
  const bool ok = s.run.status == RunStatus::Converged && s.run.final_grad_norm < 1e-6 && s.run.iterations() <= 500 &&
                  dt < 10.0;
  report(1, ok, fmt("1D Henon p=3 l=1: %s in %d iterations, |grad_N E| = %.3e, %.2f s", to_string(s.run.status),
                    s.run.iterations(), s.run.final_grad_norm, dt));
}

void criterion_3() {
  bool ok = true;
  std::string detail;
  auto check = [&](const Solved& s) {
    if (s.run.status != RunStatus::Converged) {
      ok = false;
      detail += s.name + " did not converge; ";
      return;
    }
    try {
      const EigenCheckResult ev = morse_index_check(*s.model, s.run.solution);
      const bool good = ev.theta[0] < -1e-8 && ev.theta[1] > 1e-8;
      ok = ok && good;
      detail += fmt("%s theta1=%.6g theta2=%.6g; ", s.name.c_str(), ev.theta[0], ev.theta[1]);
    } catch (const NehariError& e) {
      ok = false;
      detail += s.name + ": " + e.what() + "; ";
    }
  };
  for (double l : {0.0, 1.0, 2.0}) {
    char name[64];
    std::snprintf(name, sizeof name, "henon1d p=3 l=%g", l);
    check(solve(name, preset_henon(l, 3.0, DomainKind::Interval), Resolution{}));
  }
  check(solve("nls square w=4 lambda=10", preset_nls(4.0, 10.0, DomainKind::Square), Resolution{}));
  report(3, ok, detail);
}

void criterion_5() {
  bool ok = true;
  double worst[3] = {0, 0, 0};
  Resolution r2;
  r2.nx = r2.ny = 40;
  const std::vector<std::shared_ptr<const EllipticModel>> models{
      make_model(preset_henon(1.0, 3.0, DomainKind::Interval), Resolution{}),
      make_model(preset_nls(4.0, 10.0, DomainKind::Square), r2),
      make_model(preset_henon(1.0, 3.0, DomainKind::Disk), r2)};
  std::mt19937_64 rng(2024);
  for (const auto& m : models) {
    const DiscreteField u = m->initial_guess();
    const ManifoldPoint um = scale_to_manifold(*m, u);
    const RiemannianGradient rg = riemannian_gradient(*m, um);
    for (int i = 0; i < 5; ++i) {
      DiscreteField v = cli::random_smooth_field(m->discretization(), rng);
      DiscreteField w = cli::random_smooth_field(m->discretization(), rng);
      v = v.scaled(m->norm(u) / m->norm(v));
      w = w.scaled(m->norm(u) / m->norm(w));
      const double h = 1e-4;

      const double d_ex = m->apply_derivative(u, v);
      const double d_fd = (m->energy(u + v.scaled(h)) - m->energy(u - v.scaled(h))) / (2 * h);
      worst[0] = std::max(worst[0], std::abs(d_fd - d_ex) / std::abs(d_ex));

      const double h_ex = m->apply_hessian(u, w, v);
      const double h_fd = (m->apply_derivative(u + w.scaled(h), v) - m->apply_derivative(u - w.scaled(h), v)) / (2 * h);
      worst[1] = std::max(worst[1], std::abs(h_fd - h_ex) / std::abs(h_ex));

      const DiscreteField xi = project_tangent(*m, um, v.scaled(1.0 / m->norm(v)), rg.h.grad_G).dir;
      const double r_ex = m->inner(rg.grad.dir, xi);
      const double r_fd = (retract(*m, um, xi, h).energy - retract(*m, um, xi, -h).energy) / (2 * h);
      worst[2] = std::max(worst[2], std::abs(r_fd - r_ex) / std::abs(r_ex));
    }
  }
  for (double e : worst) ok = ok && e <= 1e-5;
  report(5, ok,
         fmt("worst relative FD error over 5 directions on interval, square, disk: E' %.2e, E'' %.2e, grad_N E %.2e",
             worst[0], worst[1], worst[2]));
}

void criterion_6() {
  bool ok = true;
  double worst_ratio = 1e300;
  double worst_residual = 0.0;
  bool identity = true;
  Resolution r2;
  r2.nx = r2.ny = 40;
  const std::vector<std::shared_ptr<const EllipticModel>> models{
      make_model(preset_henon(1.0, 3.0, DomainKind::Interval), Resolution{}),
      make_model(preset_nls(4.0, 10.0, DomainKind::Square), r2),
      make_model(preset_henon(2.0, 2.0, DomainKind::Disk), r2)};
  std::mt19937_64 rng(77);
  for (const auto& m : models) {
    const ManifoldPoint u = scale_to_manifold(*m, m->initial_guess());
    const RiemannianGradient rg = riemannian_gradient(*m, u);
    identity = identity && retract(*m, u, rg.grad.dir, 0.0).field.coeffs() == u.field.coeffs();
    for (int i = 0; i < 3; ++i) {
      const DiscreteField phi = cli::random_smooth_field(m->discretization(), rng);
      const DiscreteField xi = project_tangent(*m, u, phi.scaled(1.0 / m->norm(phi)), rg.h.grad_G).dir;
      std::vector<double> err;
      for (double s : {1e-2, 1e-3, 1e-4}) {
        const ManifoldPoint r = retract(*m, u, xi, s);
        worst_residual = std::max(worst_residual, std::abs(r.nehari_residual) / r.norm_sq);
        err.push_back(m->norm((r.field - u.field).scaled(1.0 / s) - xi));
      }
      // O(s): each decade of s removes a decade of error.
      worst_ratio = std::min({worst_ratio, err[0] / err[1], err[1] / err[2]});
    }
  }
  for (const auto& s : runs) {
    for (const auto& it : s.run.trace) worst_residual = std::max(worst_residual, std::abs(it.nehari_residual) / it.norm_sq);
  }
  ok = identity && worst_ratio > 5.0 && worst_residual <= 1e-8;
  report(6, ok,
         fmt("R_u(0) = u %s; smallest error decay per decade %.3g; worst |G| / |u|^2 %.2e", identity ? "exact" : "broken",
             worst_ratio, worst_residual));
}

void criterion_7() {
  const auto t0 = Clock::now();
  BisectionOptions o;
  o.tol = 0.05;
  const CriticalExponentResult r = bisect_critical_l(3.0, 1.0, 2.0, o);
  const double dt = seconds_since(t0);
  const bool ok = r.l_star > 1.18 && r.l_star < 1.29 && r.l_star < 4.0 / (3.0 - 1.0) && dt < 300.0;
  report(7, ok, fmt("1D p=3 tol 0.05: l* = %.4f, bracket (%.4f, %.4f), %d evaluations, %.1f s", r.l_star, r.bracket_lo,
                    r.bracket_hi, r.n_evals(), dt));
}

void criterion_8() {
  const auto t0 = Clock::now();
  BisectionOptions o;
  o.tol = 0.01;
  std::vector<LawPoint> pts;
  bool bound = true;
  int unconverged = 0;
  for (double p : {2.0, 2.5, 3.0, 3.5, 4.0, 5.0}) {
    const CriticalExponentResult r = bisect_critical_l(p, 2.0 / (p - 1), 3.0 / (p - 1), o);
    pts.push_back({p, r.l_star});
    bound = bound && r.l_star < 4.0 / (p - 1);
    unconverged += r.unconverged;
    std::printf("  p=%.2f l*=%.5f (bracket %.5f..%.5f, %d evals)\n", p, r.l_star, r.bracket_lo, r.bracket_hi,
                r.n_evals());
  }
  const FitResult f = fit_inverse_law(pts);
  const double k0 = f.params[0];
  const double lambda1 = test::kPi * test::kPi / 4.0;
  const double dt = seconds_since(t0);
  const bool ok = k0 >= 2.40 && k0 <= 2.55 && bound && dt < 1800.0;
  report(8, ok, fmt("k0 = %.5f, MSE = %.3e, |k0 - pi^2/4| = %.4f, all l* < 4/(p-1): %s, %d unconverged solves, %.1f s",
                    k0, f.mse, std::abs(k0 - lambda1), bound ? "yes" : "no", unconverged, dt));
}

void criterion_9() {
  bool ok = true;
  std::string detail;
  struct Case {
    double p, lo, hi, accept_lo, accept_hi;
  };
  for (const Case c : {Case{3.0, 0.4, 0.8, 0.45, 0.65}, Case{2.0, 1.5, 2.0, 1.65, 1.85}}) {
    const auto t0 = Clock::now();
    BisectionOptions o;
    o.domain = DomainKind::Disk;
    o.tol = 0.05;
    const CriticalExponentResult r = bisect_critical_l(c.p, c.lo, c.hi, o);
    const double dt = seconds_since(t0);
    ok = ok && r.l_star > c.accept_lo && r.l_star < c.accept_hi && dt < 1800.0;
    detail += fmt("p=%g: l* = %.4f in (%.4f, %.4f), %.1f s; ", c.p, r.l_star, r.bracket_lo, r.bracket_hi, dt);
  }
  report(9, ok, "disk 64x64 tol 0.05: " + detail);
}

void criterion_10() {
  bool ok = true;
  std::string detail;
  auto sequence = [&](const char* label, const std::vector<std::pair<double, double>>& params) {
    double last_peak = -1e300;
    double last_energy = -1e300;
    detail += label;
    for (const auto& [omega, lambda] : params) {
      char name[64];
      std::snprintf(name, sizeof name, "nls square w=%g lambda=%g", omega, lambda);
      const Solved& s = solve(name, preset_nls(omega, lambda, DomainKind::Square), Resolution{});
      const double pk = peak(s.run.solution.field);
      const double en = s.run.solution.energy;
      ok = ok && s.run.status == RunStatus::Converged && pk > last_peak && en > last_energy;
      detail += fmt(" (%g,%g): peak %.5g E %.5g;", omega, lambda, pk, en);
      last_peak = pk;
      last_energy = en;
    }
    detail += " ";
  };
  sequence("omega=4:", {{4, -4}, {4, 10}, {4, 50}});
  sequence("lambda=4:", {{10, 4}, {25, 4}, {45, 4}});
  report(10, ok, detail);
}

void criterion_11() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "nehari_acceptance_determinism";
  fs::remove_all(base);
  std::istringstream text("problem.l = 2\nproblem.p = 3\n");
  const cli::RunConfig cfg = cli::parse_config(text);
  std::ostringstream sink;
  bool ok = true;
  std::string first[2];
  for (int k = 0; k < 3; ++k) {
    const fs::path dir = base / std::to_string(k);
    ok = ok && cli::cmd_solve(cfg, {dir, 1, true}, sink, sink) == cli::kExitOk;
    const char* files[2] = {"convergence.csv", "solution.field"};
    for (int j = 0; j < 2; ++j) {
      std::ifstream in(dir / files[j], std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      if (k == 0) first[j] = ss.str();
      else ok = ok && ss.str() == first[j] && !first[j].empty();
    }
  }
  report(11, ok, "three solve runs of one config give byte-identical convergence.csv and solution.field");
}

void criterion_2_4_12() {
  // Criterion 4 also needs a monotone run.
  NmomConfig mono;
  mono.rho = 0.0;
  const Solved& m = solve("henon1d p=3 l=1 rho=0", preset_henon(1.0, 3.0, DomainKind::Interval), Resolution{}, mono);
  bool monotone = m.run.status == RunStatus::Converged;
  for (std::size_t n = 1; n < m.run.trace.size(); ++n) monotone = monotone && m.run.trace[n].energy <= m.run.trace[n - 1].energy;

  const NmomConfig defaults;
  bool ok2 = true;
  bool ok4 = monotone;
  bool ok12 = true;
  double worst_full = 0.0;
  double worst_tail = 0.0;
  double worst_slope = 0.0;
  double worst_norm = 0.0;
  double worst_ratio = 0.0;
  double worst_last = 0.0;
  int tail_steps = 0;
  int runs_with_tail = 0;
  int converged = 0;
  for (const auto& s : runs) {
    if (s.run.status != RunStatus::Converged) continue;
    ++converged;
    const NmomConfig& cfg = s.name.find("rho=0") != std::string::npos ? mono : defaults;
    worst_full = std::max(worst_full, s.run.final_full_grad_norm);
    ok2 = ok2 && s.run.final_full_grad_norm <= 10 * cfg.eps_tol;
    const std::string chain = verify_line_search_chain(s.run, cfg);
    if (!chain.empty()) {
      ok4 = false;
      std::printf("  %s: %s\n", s.name.c_str(), chain.c_str());
    }
    const GradientRelatedReport g = diagnostics_gradient_related(s.run, 10 * cfg.eps_tol);
    worst_tail = std::max(worst_tail, g.tail_step_max);
    worst_last = std::max(worst_last, g.last_step);
    tail_steps += g.tail_length;
    runs_with_tail += g.tail_length > 0 ? 1 : 0;
    worst_slope = std::max(worst_slope, g.max_slope_defect);
    worst_norm = std::max(worst_norm, g.max_norm_defect);
    worst_ratio = std::max(worst_ratio, g.retraction_ratio_max);
    ok12 = ok12 && g.tail_step_max < 1e-4 && g.max_slope_defect < 1e-10 && g.max_norm_defect < 1e-10 &&
           std::isfinite(g.retraction_ratio_max);
  }
  report(2, ok2 && converged > 0, fmt("%d converged runs; worst |grad E(u*)|_H = %.3e (bound 1e-5)", converged, worst_full));
  report(4, ok4 && converged > 0,
         fmt("E(u_n) <= C_n <= C_{n-1} <= E(u_0) on %d converged traces; rho=0 run monotone: %s", converged,
             monotone ? "yes" : "no"));
  report(12, ok12 && tail_steps > 0,
         fmt("tail step max %.3e over %d steps with |grad_N E| < 1e-5 in %d of %d runs (largest final step %.3e); "
             "slope defect %.2e; norm defect %.2e; max retraction ratio %.4g",
             worst_tail, tail_steps, runs_with_tail, converged, worst_last, worst_slope, worst_norm, worst_ratio));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<std::function<void()>> steps{criterion_1, criterion_3, criterion_5, criterion_6,  criterion_7,
                                                 criterion_8, criterion_9, criterion_10, criterion_11, criterion_2_4_12};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("FAIL: unexpected error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("acceptance: %d failure(s), %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
