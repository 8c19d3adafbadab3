#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "nehari/cli.hpp"

namespace nehari::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw NehariError(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  return f;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw NehariError(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

double peak(const DiscreteField& u) { return u.size() == 0 ? 0.0 : u.coeffs().cwiseAbs().maxCoeff(); }

}  // namespace

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("NEHARI_OPT_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  return std::max(1, flag_value);
}

DiscreteField random_smooth_field(const Discretization& disc, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  constexpr int kModes = 4;
  double c[kModes][kModes];
  for (auto& row : c)
    for (double& v : row) v = normal(rng);
  const double pi = std::numbers::pi;
  switch (disc.domain()) {
    case DomainKind::Interval:
      return disc.interpolate([&](Point pt) {
        double s = 0.0;
        for (int k = 0; k < kModes; ++k) s += c[0][k] * std::sin((k + 1) * pi * (pt.x + 1.0) / 2.0);
        return s;
      });
    case DomainKind::Square:
      return disc.interpolate([&](Point pt) {
        double s = 0.0;
        for (int k = 0; k < kModes; ++k)
          for (int m = 0; m < kModes; ++m)
            s += c[k][m] * std::sin((k + 1) * pi * (pt.x + 1.0) / 2.0) * std::sin((m + 1) * pi * (pt.y + 1.0) / 2.0);
        return s;
      });
    case DomainKind::Disk:
      return disc.interpolate([&](Point pt) {
        const double r2 = radius_sq(pt);
        const double th = std::atan2(pt.y, pt.x);
        double s = c[0][0];
        for (int m = 1; m < kModes; ++m) {
          const double rm = std::pow(std::sqrt(r2), m);
          s += rm * (c[1][m] * std::cos(m * th) + c[2][m] * std::sin(m * th));
        }
        s += c[3][0] * r2 + c[3][1] * r2 * r2;
        return (1.0 - r2) * s;
      });
  }
  throw NehariError(ErrorKind::ConfigError, "unknown domain");
}

DiscreteField initial_direction(const RunConfig& cfg, const EllipticModel& model) {
  const Discretization& disc = model.discretization();
  const double pi = std::numbers::pi;
  switch (cfg.seed_kind) {
    case SeedKind::V0:
      return model.initial_guess();
    case SeedKind::Radial:
      return disc.interpolate([&](Point pt) {
        switch (disc.domain()) {
          case DomainKind::Interval: return std::cos(pi * pt.x / 2.0);
          case DomainKind::Square: return std::cos(pi * pt.x / 2.0) * std::cos(pi * pt.y / 2.0);
          case DomainKind::Disk: return 1.0 - radius_sq(pt);
        }
        return 0.0;
      });
    case SeedKind::File: {
      std::ifstream in(cfg.seed_file);
      if (!in) throw NehariError(ErrorKind::ConfigError, "seed.file: cannot open '" + cfg.seed_file + "'");
      FieldDump dump = read_field(in);
      if (dump.field.mesh_id() != disc.mesh_id()) {
        throw NehariError(ErrorKind::ConfigError,
                          "seed.file: field on '" + dump.field.mesh_id() + "' but the problem uses '" + disc.mesh_id() + "'");
      }
      return dump.field;
    }
  }
  throw NehariError(ErrorKind::ConfigError, "seed.kind: unsupported");
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto model = make_model(cfg.problem(), cfg.resolution, cfg.linear());
  const DiscreteField v0 = initial_direction(cfg, *model);
  ensure_dir(opts.out_dir);

  RunRecord run;
  try {
    run = nmom_run(*model, v0, cfg.optimizer);
  } catch (const NehariError& e) {
    err << "solve failed: " << e.what() << '\n';
    return kExitSolver;
  }

  {
    auto f = open_out(opts.out_dir / "convergence.csv");
    write_convergence_csv(f, run);
  }
  {
    auto f = open_out(opts.out_dir / "solution.field");
    write_field(f, model->discretization(), run.solution.field);
  }

  std::ostringstream s;
  s << "problem=" << cfg.problem().name << '\n';
  s << "mesh=" << model->mesh_id() << '\n';
  s << "status=" << to_string(run.status) << '\n';
  s << "message=" << run.message << '\n';
  s << "iterations=" << run.iterations() << '\n';
  s << "energy=" << fmt(run.solution.energy) << '\n';
  s << "grad_norm=" << fmt(run.final_grad_norm) << '\n';
  s << "full_grad_norm=" << fmt(run.final_full_grad_norm) << '\n';
  s << "nehari_residual=" << fmt(run.solution.nehari_residual) << '\n';
  s << "peak=" << fmt(peak(run.solution.field)) << '\n';
  const AsymmetryReport mu = asymmetry(model->discretization(), run.solution.field);
  s << "mu=" << fmt(mu.mu) << '\n';
  s << "symmetric=" << (mu.symmetric ? "true" : "false") << '\n';
  if (cfg.eigen_k > 0) {
    EigenOptions eo;
    eo.k = cfg.eigen_k;
    eo.seed = cfg.random_seed;
    try {
      const EigenCheckResult ev = morse_index_check(*model, run.solution, eo);
      for (std::size_t i = 0; i < ev.theta.size(); ++i) s << "theta" << i + 1 << '=' << fmt(ev.theta[i]) << '\n';
      s << "morse_index=" << ev.morse_index << '\n';
    } catch (const NehariError& e) {
      err << "eigenvalue check failed: " << e.what() << '\n';
      s << "morse_index=unknown\n";
    }
  }
  {
    auto f = open_out(opts.out_dir / "summary.txt");
    f << s.str();
  }
  if (!opts.quiet) out << s.str();

  switch (run.status) {
    case RunStatus::Converged: return kExitOk;
    case RunStatus::MaxIter: return kExitMaxIter;
    case RunStatus::LineSearchFailure: return kExitSolver;
  }
  return kExitSolver;
}

// ---------------------------------------------------------------------------
// bisect and sweep-fit

namespace {

constexpr const char* kResultsHeader = "p,l_lo,l_hi,l_star,n_evals,total_iters\n";

std::string result_row(const CriticalExponentResult& r) {
  return fmt(r.p) + ',' + fmt(r.bracket_lo) + ',' + fmt(r.bracket_hi) + ',' + fmt(r.l_star) + ',' +
         std::to_string(r.n_evals()) + ',' + std::to_string(r.total_iterations) + '\n';
}

void write_evaluations(std::ostream& f, const std::vector<CriticalExponentResult>& results) {
  f << "p,l,mu,asymmetric,status,iterations,warm\n";
  for (const auto& r : results) {
    for (const auto& e : r.evaluations) {
      f << fmt(r.p) << ',' << fmt(e.l) << ',' << fmt(e.mu) << ',' << (e.asymmetric ? 1 : 0) << ','
        << to_string(e.status) << ',' << e.iterations << ',' << (e.warm ? 1 : 0) << '\n';
    }
  }
}

int bracket_error(std::ostream& err, const NehariError& e) {
  err << e.what() << '\n';
  return e.kind() == ErrorKind::InvalidBracket ? kExitConfig : kExitSolver;
}

}  // namespace

int cmd_bisect(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  ensure_dir(opts.out_dir);
  CriticalExponentResult r;
  try {
    r = bisect_critical_l(cfg.p, cfg.l_lo, cfg.l_hi, cfg.bisection());
  } catch (const NehariError& e) {
    return bracket_error(err, e);
  }
  {
    auto f = open_out(opts.out_dir / cfg.results_file);
    f << kResultsHeader << result_row(r);
  }
  {
    auto f = open_out(opts.out_dir / "evaluations.csv");
    write_evaluations(f, {r});
  }
  if (!opts.quiet) {
    out << "p=" << fmt(r.p) << '\n'
        << "l_lo=" << fmt(r.bracket_lo) << '\n'
        << "l_hi=" << fmt(r.bracket_hi) << '\n'
        << "l_star=" << fmt(r.l_star) << '\n'
        << "n_evals=" << r.n_evals() << '\n'
        << "total_iters=" << r.total_iterations << '\n'
        << "unconverged=" << r.unconverged << '\n';
  }
  return kExitOk;
}

int cmd_sweep_fit(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  ensure_dir(opts.out_dir);
  const std::size_t n = cfg.p_grid.size();
  std::vector<CriticalExponentResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  const BisectionOptions bo = cfg.bisection();

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const double p = cfg.p_grid[i];
      try {
        results[i] = bisect_critical_l(p, cfg.k_lo / (p - 1.0), cfg.k_hi / (p - 1.0), bo);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(std::max(1, opts.threads), static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NehariError& e) {
      err << "p=" << fmt(cfg.p_grid[i]) << ": ";
      return bracket_error(err, e);
    }
  }

  {
    auto f = open_out(opts.out_dir / cfg.results_file);
    f << kResultsHeader;
    for (const auto& r : results) f << result_row(r);
  }
  {
    auto f = open_out(opts.out_dir / "evaluations.csv");
    write_evaluations(f, results);
  }

  std::vector<LawPoint> points;
  for (const auto& r : results) points.push_back({r.p, r.l_star});
  const bool exp_law = cfg.fit == "exp" || (cfg.fit == "auto" && cfg.domain != DomainKind::Interval);

  std::ostringstream s;
  try {
    if (exp_law) {
      const FitResult fit = fit_exp_law(points);
      s << "model=exp_law\n"
        << "k1=" << fmt(fit.params[0]) << '\n'
        << "k2=" << fmt(fit.params[1]) << '\n'
        << "mse=" << fmt(fit.mse) << '\n';
    } else {
      const FitResult fit = fit_inverse_law(points);
      const double lambda1 = first_dirichlet_eigenvalue(cfg.domain);
      s << "model=inverse_law\n"
        << "k0=" << fmt(fit.params[0]) << '\n'
        << "mse=" << fmt(fit.mse) << '\n'
        << "lambda1=" << fmt(lambda1) << '\n'
        << "abs_k0_minus_lambda1=" << fmt(std::abs(fit.params[0] - lambda1)) << '\n';
    }
  } catch (const NehariError& e) {
    err << "fit failed: " << e.what() << '\n';
    return kExitSolver;
  }
  bool below_bound = true;
  int unconverged = 0;
  for (const auto& r : results) {
    below_bound = below_bound && r.l_star < 4.0 / (r.p - 1.0);
    unconverged += r.unconverged;
  }
  s << "points=" << n << '\n'
    << "below_4_over_p_minus_1=" << (below_bound ? "true" : "false") << '\n'
    << "unconverged_evaluations=" << unconverged << '\n';
  {
    auto f = open_out(opts.out_dir / "fit.txt");
    f << s.str();
  }
  if (!opts.quiet) out << s.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check

namespace {

class CheckLog {
 public:
  explicit CheckLog(std::ostream& out) : out_(out) {}

  void report(const std::string& name, bool ok, const std::string& detail) {
    out_ << (ok ? "PASS " : "FAIL ") << name << ' ' << detail << '\n';
    failed_ = failed_ || !ok;
  }
  void measure(const std::string& name, double value, double limit) {
    report(name, value <= limit, "value=" + fmt(value) + " limit=" + fmt(limit));
  }
  [[nodiscard]] bool failed() const noexcept { return failed_; }

 private:
  std::ostream& out_;
  bool failed_ = false;
};

double rel_err(double approx, double exact) {
  const double scale = std::max(std::abs(exact), std::abs(approx));
  return scale == 0.0 ? 0.0 : std::abs(approx - exact) / scale;
}

}  // namespace

int cmd_check(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto model = make_model(cfg.problem(), cfg.resolution, cfg.linear());
  const EllipticModel& f = *model;
  std::mt19937_64 rng(cfg.random_seed);
  std::ostringstream s;
  CheckLog log(s);
  s << "# seed=" << cfg.random_seed << " mesh=" << f.mesh_id() << '\n';

  const ManifoldPoint u0 = scale_to_manifold(f, initial_direction(cfg, f), cfg.optimizer.manifold);
  constexpr int kDirections = 5;

  // Riesz representer: (∇E(u), v)_H = <E'(u), v>.
  {
    double worst = 0.0;
    const GradientPair h = f.h_gradients(u0.field);
    for (int i = 0; i < kDirections; ++i) {
      const DiscreteField v = random_smooth_field(f.discretization(), rng);
      worst = std::max(worst, rel_err(f.inner(h.grad_E, v), f.apply_derivative(u0.field, v)));
    }
    log.measure("riesz_consistency", worst, 1e-8);
  }

  // Directional finite differences at u0.
  {
    double worst_d = 0.0;
    double worst_h = 0.0;
    double worst_r = 0.0;
    const RiemannianGradient rg = riemannian_gradient(f, u0, cfg.optimizer.manifold);
    for (int i = 0; i < kDirections; ++i) {
      DiscreteField v = random_smooth_field(f.discretization(), rng);
      DiscreteField w = random_smooth_field(f.discretization(), rng);
      v = v.scaled(1.0 / f.norm(v));
      w = w.scaled(1.0 / f.norm(w));
      const double h = 1e-4 * f.norm(u0.field);
      const double fd_d = (f.energy(u0.field + v.scaled(h)) - f.energy(u0.field - v.scaled(h))) / (2.0 * h);
      worst_d = std::max(worst_d, rel_err(fd_d, f.apply_derivative(u0.field, v)));
      const double fd_h =
          (f.apply_derivative(u0.field + w.scaled(h), v) - f.apply_derivative(u0.field - w.scaled(h), v)) / (2.0 * h);
      worst_h = std::max(worst_h, rel_err(fd_h, f.apply_hessian(u0.field, w, v)));
      const TangentVector xi = project_tangent(f, u0, v, rg.h.grad_G, cfg.optimizer.manifold);
      const double s_step = 1e-4;
      const double fd_r =
          (retract(f, u0, xi.dir, s_step).energy - retract(f, u0, xi.dir, -s_step).energy) / (2.0 * s_step);
      worst_r = std::max(worst_r, rel_err(fd_r, f.inner(rg.grad.dir, xi.dir)));
    }
    log.measure("fd_derivative", worst_d, 1e-5);
    log.measure("fd_hessian", worst_h, 1e-5);
    log.measure("fd_riemannian_gradient", worst_r, 1e-5);
  }

  // Retraction contract at u0.
  {
    const RiemannianGradient rg = riemannian_gradient(f, u0, cfg.optimizer.manifold);
    DiscreteField v = random_smooth_field(f.discretization(), rng);
    const DiscreteField xi = project_tangent(f, u0, v.scaled(1.0 / f.norm(v)), rg.h.grad_G).dir;
    const ManifoldPoint r0 = retract(f, u0, xi, 0.0);
    const bool same = r0.field.coeffs() == u0.field.coeffs();
    log.report("retraction_zero", same, same ? "exact=true" : "exact=false");
    double prev = 0.0;
    double worst_ratio = 0.0;
    std::string detail;
    for (double step : {1e-2, 1e-3, 1e-4}) {
      const ManifoldPoint r = retract(f, u0, xi, step);
      const double e = f.norm((r.field - u0.field).scaled(1.0 / step) - xi);
      detail += (detail.empty() ? "errors=" : ",") + fmt(e);
      if (prev > 0.0) worst_ratio = std::max(worst_ratio, e / prev);
      prev = e;
    }
    // O(s): each decade should cut the error by about ten.
    log.report("retraction_first_order", worst_ratio < 0.2, detail + " worst_ratio=" + fmt(worst_ratio));
  }

  // A full run and its diagnostics.
  RunRecord run;
  bool have_run = false;
  try {
    run = nmom_run(f, u0.field, cfg.optimizer);
    have_run = true;
  } catch (const NehariError& e) {
    log.report("solve", false, std::string("error=") + e.what());
  }
  if (have_run) {
    log.report("solve_converged", run.status == RunStatus::Converged,
               std::string("status=") + to_string(run.status) + " iterations=" + std::to_string(run.iterations()) +
                   " grad_norm=" + fmt(run.final_grad_norm));
    log.measure("natural_constraint", run.final_full_grad_norm, 10.0 * cfg.optimizer.eps_tol);
    double worst_g = 0.0;
    for (const auto& r : run.trace) worst_g = std::max(worst_g, std::abs(r.nehari_residual) / r.norm_sq);
    log.measure("manifold_residual", worst_g, 1e-8);
    const std::string chain = verify_line_search_chain(run, cfg.optimizer);
    log.report("line_search_chain", chain.empty(), chain.empty() ? "steps=" + std::to_string(run.iterations()) : chain);
    if (cfg.optimizer.rho == 0.0) {
      bool mono = true;
      for (std::size_t n = 1; n < run.trace.size(); ++n) mono = mono && run.trace[n].energy <= run.trace[n - 1].energy;
      log.report("monotone_descent", mono, "rho=0");
    }
    const GradientRelatedReport gr = diagnostics_gradient_related(run, 10.0 * cfg.optimizer.eps_tol);
    log.measure("steepest_descent_slope", gr.max_slope_defect, 1e-10);
    log.measure("steepest_descent_norm", gr.max_norm_defect, 1e-10);
    log.report("retraction_ratio_finite", std::isfinite(gr.retraction_ratio_max),
               "value=" + fmt(gr.retraction_ratio_max));
    log.report("step_tail", gr.tail_step_max < 1e-4,
               "value=" + fmt(gr.tail_step_max) + " limit=1e-4 tail_steps=" + std::to_string(gr.tail_length) +
                   " last_step=" + fmt(gr.last_step));

    EigenOptions eo;
    eo.seed = cfg.random_seed;
    try {
      const EigenCheckResult ev = morse_index_check(f, run.solution, eo);
      const bool ok = ev.theta[0] < -1e-8 && ev.theta[1] > -1e-8;
      log.report("morse_index_one", ok,
                 "theta1=" + fmt(ev.theta[0]) + " theta2=" + fmt(ev.theta[1]) + " mi=" + std::to_string(ev.morse_index));
    } catch (const NehariError& e) {
      log.report("morse_index_one", false, std::string("error=") + e.what());
    }
  }

  if (!opts.quiet || log.failed()) out << s.str();
  if (!opts.out_dir.empty()) {
    try {
      ensure_dir(opts.out_dir);
      auto file = open_out(opts.out_dir / "check.txt");
      file << s.str();
    } catch (const NehariError& e) {
      err << e.what() << '\n';
    }
  }
  return log.failed() ? kExitCheckFailed : kExitOk;
}

int run_command(const std::string& name, const std::filesystem::path& config, const CommandOptions& opts,
                std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config);
    if (name == "solve") return cmd_solve(cfg, opts, out, err);
    if (name == "bisect") return cmd_bisect(cfg, opts, out, err);
    if (name == "sweep-fit") return cmd_sweep_fit(cfg, opts, out, err);
    if (name == "check") return cmd_check(cfg, opts, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const NehariError& e) {
    err << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::IoError:
      case ErrorKind::InvalidCoefficient:
      case ErrorKind::InvalidBracket:
        return kExitConfig;
      default:
        return kExitSolver;
    }
  }
}

}  // namespace nehari::cli
