#include "nehari/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

namespace nehari {

namespace {

void require(bool ok, const char* key, const char* range) {
  if (!ok) throw NehariError(ErrorKind::ConfigError, std::string("optimizer.") + key + " must be " + range);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void NmomConfig::validate() const {
  require(sigma > 0.0 && sigma < 1.0, "sigma", "in (0, 1)");
  require(beta > 0.0 && beta < 1.0, "beta", "in (0, 1)");
  require(rho >= 0.0 && rho < 1.0, "rho", "in [0, 1)");
  require(alpha_min > 0.0 && std::isfinite(alpha_min), "alpha_min", "positive");
  require(alpha_max > alpha_min && std::isfinite(alpha_max), "alpha_max", "greater than alpha_min");
  require(eps_tol > 0.0, "eps_tol", "positive");
  require(tau0 > 0.0 && std::isfinite(tau0), "tau0", "positive");
  require(max_iter >= 0, "max_iter", "non-negative");
  require(max_backtracks >= 0, "max_backtracks", "non-negative");
  require(stagnation_tol >= 0.0, "stagnation_tol", "non-negative");
  require(stagnation_window >= 1, "stagnation_window", "at least 1");
}

NonmonotoneState update_nonmonotone(const NonmonotoneState& state, double e_next, double rho) {
  const double q_next = rho * state.q_n + 1.0;
  return {(rho * state.q_n * state.c_n + e_next) / q_next, q_next};
}

StepProducts step_products(const NehariFunctional& f, const DiscreteField& v, const DiscreteField& y) {
  return {f.inner(v, v), f.inner(v, y), f.inner(y, y)};
}

double bb_trial_step(int n, const StepProducts& prev, const NmomConfig& cfg) {
  if (n == 0) return cfg.tau0;
  const double vy = std::abs(prev.vy);
  const double tau = (n % 2 == 1) ? prev.vv / vy : vy / prev.yy;
  if (!std::isfinite(tau) || !(tau > 0.0)) return cfg.alpha_max;
  return std::min(std::max(cfg.alpha_min, tau), cfg.alpha_max);
}

LineSearchResult backtracking_search(const NehariFunctional& f, const ManifoldPoint& u, const TangentVector& xi,
                                     double slope, const NonmonotoneState& state, double alpha0,
                                     const NmomConfig& cfg) {
  if (!(slope < 0.0)) {
    throw NehariError(ErrorKind::LineSearchFailure, "search direction is not a descent direction (slope " +
                                                        fmt17(slope) + ")");
  }
  double alpha = alpha0;
  for (int m = 0; m <= cfg.max_backtracks; ++m) {
    std::optional<ManifoldPoint> candidate;
    try {
      candidate = retract(f, u, xi.dir, alpha, cfg.manifold);
    } catch (const NehariError& e) {
      // A step that leaves the region where ρ is defined is simply rejected.
      if (e.kind() != ErrorKind::DegenerateDirection && e.kind() != ErrorKind::NotOnManifold) throw;
    }
    if (candidate && candidate->energy <= state.c_n + cfg.sigma * alpha * slope) {
      return {alpha, std::move(*candidate), m};
    }
    alpha *= cfg.beta;
  }
  throw NehariError(ErrorKind::LineSearchFailure,
                    "no acceptable step after " + std::to_string(cfg.max_backtracks) + " backtracks");
}

TangentVector SteepestDescent::direction(const NehariFunctional& /*f*/, const ManifoldPoint& u,
                                         const RiemannianGradient& grad) const {
  return {u.field, grad.grad.dir.scaled(-1.0)};
}

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIter: return "MaxIter";
    case RunStatus::LineSearchFailure: return "LineSearchFailure";
  }
  return "Unknown";
}

RunRecord nmom_run(const NehariFunctional& f, const DiscreteField& u0_direction, const NmomConfig& cfg,
                   const DirectionPolicy& policy) {
  cfg.validate();
  RunRecord run;
  ManifoldPoint u = scale_to_manifold(f, u0_direction, cfg.manifold);
  NonmonotoneState state = NonmonotoneState::initial(u.energy);

  std::optional<DiscreteField> prev_field;
  std::optional<DiscreteField> prev_grad;
  int stagnant = 0;

  for (int n = 0;; ++n) {
    const RiemannianGradient rg = riemannian_gradient(f, u, cfg.manifold);

    IterationRecord rec;
    rec.n = n;
    rec.energy = u.energy;
    rec.grad_norm = rg.norm;
    rec.c_n = state.c_n;
    rec.q_n = state.q_n;
    rec.nehari_residual = u.nehari_residual;
    rec.norm_sq = u.norm_sq;

    if (n > 0) {
      const double e_prev = run.trace.back().energy;
      stagnant = std::abs(u.energy - e_prev) < cfg.stagnation_tol * (1.0 + std::abs(u.energy)) ? stagnant + 1 : 0;
    }

    auto finish = [&](RunStatus status, std::string message) {
      run.trace.push_back(rec);
      run.status = status;
      run.message = std::move(message);
      run.final_grad_norm = rg.norm;
      run.final_full_grad_norm = f.norm(rg.h.grad_E);
    };

    if (rg.norm < cfg.eps_tol) {
      finish(RunStatus::Converged, "gradient norm below tolerance");
      break;
    }
    if (stagnant >= cfg.stagnation_window) {
      const bool near = rg.norm < 10.0 * cfg.eps_tol;
      finish(near ? RunStatus::Converged : RunStatus::MaxIter, "energy stagnated");
      break;
    }
    if (n >= cfg.max_iter) {
      finish(RunStatus::MaxIter, "iteration limit reached");
      break;
    }

    const TangentVector xi = policy.direction(f, u, rg);
    const double slope = f.inner(rg.grad.dir, xi.dir);
    double alpha0 = cfg.tau0;
    if (n > 0) {
      const DiscreteField v = u.field - *prev_field;
      const DiscreteField y = rg.grad.dir - *prev_grad;
      alpha0 = bb_trial_step(n, step_products(f, v, y), cfg);
    }
    rec.trial_alpha = alpha0;
    rec.slope = slope;
    rec.direction_norm = f.norm(xi.dir);

    LineSearchResult ls;
    try {
      ls = backtracking_search(f, u, xi, slope, state, alpha0, cfg);
    } catch (const NehariError& e) {
      if (e.kind() != ErrorKind::LineSearchFailure) throw;
      finish(RunStatus::LineSearchFailure, e.what());
      break;
    }
    rec.alpha = ls.alpha;
    rec.backtracks = ls.backtracks;
    rec.step_norm = f.norm(ls.next.field - u.field);
    run.trace.push_back(rec);

    prev_field = u.field;
    prev_grad = rg.grad.dir;
    state = update_nonmonotone(state, ls.next.energy, cfg.rho);
    u = std::move(ls.next);
  }
  run.solution = std::move(u);
  return run;
}

void write_convergence_csv(std::ostream& out, const RunRecord& run) {
  out << "n,energy,grad_norm,alpha,backtracks,C_n,nehari_residual\n";
  for (const auto& r : run.trace) {
    out << r.n << ',' << fmt17(r.energy) << ',' << fmt17(r.grad_norm) << ',' << fmt17(r.alpha) << ','
        << r.backtracks << ',' << fmt17(r.c_n) << ',' << fmt17(r.nehari_residual) << '\n';
  }
}

GradientRelatedReport diagnostics_gradient_related(const RunRecord& run, double tail_grad) {
  GradientRelatedReport report;
  for (const auto& r : run.trace) {
    if (r.alpha <= 0.0) continue;
    const double g2 = r.grad_norm * r.grad_norm;
    report.max_slope_defect = std::max(report.max_slope_defect, std::abs(r.slope + g2) / g2);
    report.max_norm_defect = std::max(report.max_norm_defect, std::abs(r.direction_norm - r.grad_norm) / r.grad_norm);
    report.retraction_ratio_max =
        std::max(report.retraction_ratio_max, r.step_norm / (r.alpha * r.direction_norm));
    ++report.steps;
    if (r.grad_norm < tail_grad) {
      report.tail_step_max = std::max(report.tail_step_max, r.step_norm);
      ++report.tail_length;
    }
    report.last_step = r.step_norm;
  }
  return report;
}

std::string verify_line_search_chain(const RunRecord& run, const NmomConfig& cfg, double rel_tol) {
  const auto& t = run.trace;
  if (t.empty()) return "empty trace";
  const double e0 = t.front().energy;
  auto slack = [&](double v) { return rel_tol * (1.0 + std::abs(v)); };
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    const auto& r = t[n];
    const double bound = r.c_n + cfg.sigma * r.alpha * r.slope;
    if (t[n + 1].energy > bound + slack(bound)) {
      return "acceptance inequality violated at n=" + std::to_string(n);
    }
  }
  for (std::size_t n = 1; n < t.size(); ++n) {
    if (t[n].energy > t[n].c_n + slack(t[n].c_n)) return "E(u_n) > C_n at n=" + std::to_string(n);
    if (t[n].c_n > t[n - 1].c_n + slack(t[n - 1].c_n)) return "C_n > C_{n-1} at n=" + std::to_string(n);
    if (t[n].c_n > e0 + slack(e0)) return "C_n > E(u_0) at n=" + std::to_string(n);
  }
  return {};
}

}  // namespace nehari
