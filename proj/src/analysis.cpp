#include "nehari/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>

namespace nehari {

namespace {

double max_abs(const Vector& c) {
  if (c.size() == 0) return 0.0;
  return c.cwiseAbs().maxCoeff();
}

AsymmetryReport make_report(double spread, const Vector& c, DomainKind domain) {
  const double peak = max_abs(c);
  if (peak == 0.0) throw NehariError(ErrorKind::ZeroField, "asymmetry degree of the zero field");
  AsymmetryReport r;
  r.threshold = asymmetry_threshold(domain);
  r.mu = spread / peak;
  r.symmetric = r.mu < r.threshold;
  return r;
}

template <class T>
const T& require_grid(const Discretization& disc, const char* what) {
  const auto* grid = dynamic_cast<const T*>(&disc);
  if (grid == nullptr) throw NehariError(ErrorKind::MeshMismatch, std::string(what) + " needs a matching grid");
  return *grid;
}

void check_field(const Discretization& disc, const DiscreteField& u) {
  if (u.mesh_id() != disc.mesh_id()) {
    throw NehariError(ErrorKind::MeshMismatch, "field on '" + u.mesh_id() + "' measured on '" + disc.mesh_id() + "'");
  }
}

}  // namespace

double asymmetry_threshold(DomainKind domain) noexcept { return domain == DomainKind::Interval ? 1e-5 : 1e-4; }

AsymmetryReport asymmetry_1d(const Discretization& disc, const DiscreteField& u) {
  require_grid<Mesh1D>(disc, "asymmetry_1d");
  check_field(disc, u);
  const Vector& c = u.coeffs();
  const Eigen::Index n = c.size();
  double spread = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) spread = std::max(spread, std::abs(c[i] - c[n - 1 - i]));
  return make_report(spread, c, DomainKind::Interval);
}

AsymmetryReport asymmetry_2d_disk(const Discretization& disc, const DiscreteField& u) {
  const auto& grid = require_grid<DiskGrid>(disc, "asymmetry_2d_disk");
  check_field(disc, u);
  const Vector& c = u.coeffs();
  double spread = 0.0;
  for (int j = 0; j < grid.n_r(); ++j) {
    const auto ring = c.segment(static_cast<Eigen::Index>(j) * grid.n_theta(), grid.n_theta());
    spread = std::max(spread, ring.maxCoeff() - ring.minCoeff());
  }
  return make_report(spread, c, DomainKind::Disk);
}

AsymmetryReport asymmetry_square(const Discretization& disc, const DiscreteField& u) {
  const auto& grid = require_grid<Grid2DSquare>(disc, "asymmetry_square");
  check_field(disc, u);
  const Vector& c = u.coeffs();
  const int nx = grid.nx();
  const int ny = grid.ny();
  double spread = 0.0;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double v = c[grid.dof_of(i, j)];
      spread = std::max(spread, std::abs(v - c[grid.dof_of(nx - i, j)]));
      spread = std::max(spread, std::abs(v - c[grid.dof_of(i, ny - j)]));
      if (nx == ny) spread = std::max(spread, std::abs(v - c[grid.dof_of(j, i)]));
    }
  }
  return make_report(spread, c, DomainKind::Square);
}

AsymmetryReport asymmetry(const Discretization& disc, const DiscreteField& u) {
  switch (disc.domain()) {
    case DomainKind::Interval: return asymmetry_1d(disc, u);
    case DomainKind::Square: return asymmetry_square(disc, u);
    case DomainKind::Disk: return asymmetry_2d_disk(disc, u);
  }
  throw NehariError(ErrorKind::MeshMismatch, "unknown domain");
}

// ---------------------------------------------------------------------------
// Morse index

EigenCheckResult morse_index_check(const EllipticModel& model, const ManifoldPoint& u_star,
                                   const EigenOptions& options) {
  const Eigen::Index n = model.discretization().dof_count();
  const int k = options.k;
  const int block = std::min<Eigen::Index>(k + options.guard, n);
  if (k < 1 || k > block) throw NehariError(ErrorKind::EigenSolveFailure, "invalid eigenvalue count");
  const double factor = std::isnan(options.nonlinear_factor) ? model.exponent() : options.nonlinear_factor;
  const HOperator& op = model.h_operator();
  const DiscreteField& u = u_star.field;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int b = 0; b < block; ++b) x(i, b) = normal(rng);
  x.col(0) = u.coeffs();

  auto apply_n = [&](const Vector& w) { return model.nonlinear_weighted_apply(u, w); };

  EigenCheckResult result;
  for (int it = 1; it <= options.max_iter; ++it) {
    // Inverse iteration step on M⁻¹N, then Rayleigh-Ritz in the M-inner product.
    Eigen::MatrixXd y(n, block);
    for (int b = 0; b < block; ++b) y.col(b) = op.solve(apply_n(x.col(b)));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    Eigen::MatrixXd mq(n, block);
    Eigen::MatrixXd nq(n, block);
    for (int b = 0; b < block; ++b) {
      mq.col(b) = op.apply(q.col(b));
      nq.col(b) = apply_n(q.col(b));
    }
    Eigen::MatrixXd gm = q.transpose() * mq;
    Eigen::MatrixXd gn = q.transpose() * nq;
    gm = 0.5 * (gm + gm.transpose()).eval();
    gn = 0.5 * (gn + gn.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(gn, gm);
    if (ritz.info() != Eigen::Success) throw NehariError(ErrorKind::EigenSolveFailure, "Rayleigh-Ritz failed");
    // Ascending ν; reverse so column 0 carries the largest ν (smallest θ).
    const Eigen::MatrixXd c = ritz.eigenvectors().rowwise().reverse();
    const Vector nu = ritz.eigenvalues().reverse();
    x = q * c;
    const Eigen::MatrixXd mx = mq * c;
    const Eigen::MatrixXd nx = nq * c;

    result.theta.assign(static_cast<std::size_t>(k), 0.0);
    result.residuals.assign(static_cast<std::size_t>(k), 0.0);
    bool converged = true;
    for (int b = 0; b < k; ++b) {
      const double theta = 1.0 - factor * nu[b];
      // (B - θM)w = (1 - θ)Mw - c Nw.
      const Vector r = (1.0 - theta) * mx.col(b) - factor * nx.col(b);
      const double rel = r.norm() / mx.col(b).norm();
      result.theta[static_cast<std::size_t>(b)] = theta;
      result.residuals[static_cast<std::size_t>(b)] = rel;
      if (!(rel <= options.tol)) converged = false;
    }
    result.iterations = it;
    if (converged) {
      result.morse_index = static_cast<int>(
          std::count_if(result.theta.begin(), result.theta.end(), [](double t) { return t < 0.0; }));
      return result;
    }
  }
  throw NehariError(ErrorKind::EigenSolveFailure,
                    "block inverse iteration did not converge in " + std::to_string(options.max_iter) + " steps");
}

// ---------------------------------------------------------------------------
// Bisection

BisectionEvaluation evaluate_symmetry(double l, double p, const BisectionOptions& options, const DiscreteField* seed) {
  const auto model = make_model(preset_henon(l, p, options.domain), options.resolution);
  BisectionEvaluation eval;
  eval.l = l;
  RunRecord run;
  bool have_run = false;
  int spent = 0;
  if (seed != nullptr) {
    try {
      run = nmom_run(*model, model->make_field(seed->coeffs()), options.solver);
      have_run = run.status == RunStatus::Converged;
      eval.warm = have_run;
      if (!have_run) spent = run.iterations();
    } catch (const NehariError&) {
      have_run = false;
    }
  }
  if (!have_run) run = nmom_run(*model, model->initial_guess(), options.solver);
  const AsymmetryReport rep = asymmetry(model->discretization(), run.solution.field);
  eval.mu = rep.mu;
  eval.asymmetric = !rep.symmetric;
  eval.status = run.status;
  eval.iterations = spent + run.iterations();
  eval.solution = run.solution.field;
  return eval;
}

CriticalExponentResult bisect_critical_l(double p, double l_lo, double l_hi, const BisectionOptions& options) {
  if (!(l_lo < l_hi) || !(options.tol > 0.0)) {
    throw NehariError(ErrorKind::InvalidBracket, "bracket must satisfy l_lo < l_hi with a positive tolerance");
  }
  CriticalExponentResult out;
  out.p = p;
  auto record = [&](const BisectionEvaluation& e) {
    out.evaluations.push_back(e);
    out.total_iterations += e.iterations;
    if (e.status != RunStatus::Converged) ++out.unconverged;
  };

  BisectionEvaluation lo = evaluate_symmetry(l_lo, p, options);
  record(lo);
  BisectionEvaluation hi = evaluate_symmetry(l_hi, p, options);
  record(hi);
  if (lo.asymmetric || !hi.asymmetric) {
    char msg[200];
    std::snprintf(msg, sizeof msg,
                  "expected a symmetric ground state at l=%.6g (mu=%.3e) and an asymmetric one at l=%.6g (mu=%.3e)",
                  l_lo, lo.mu, l_hi, hi.mu);
    throw NehariError(ErrorKind::InvalidBracket, msg);
  }
  DiscreteField seed = hi.solution;
  double a = l_lo;
  double b = l_hi;
  while (b - a > options.tol * (1.0 + 1e-12)) {
    const double mid = 0.5 * (a + b);
    BisectionEvaluation e = evaluate_symmetry(mid, p, options, options.warm_start ? &seed : nullptr);
    if (e.asymmetric) {
      b = mid;
      seed = e.solution;
    } else {
      a = mid;
    }
    record(e);
  }
  out.bracket_lo = a;
  out.bracket_hi = b;
  out.l_star = 0.5 * (a + b);
  return out;
}

// ---------------------------------------------------------------------------
// Fits

namespace {

void check_points(std::span<const LawPoint> points, std::size_t minimum) {
  if (points.size() < minimum) {
    throw NehariError(ErrorKind::InsufficientData,
                      "need at least " + std::to_string(minimum) + " points, got " + std::to_string(points.size()));
  }
  for (const auto& pt : points) {
    if (!(pt.p > 1.0)) throw NehariError(ErrorKind::NonPositiveData, "fit points need p > 1");
  }
}

double mse_of(const FitResult& fit, std::span<const LawPoint> points) {
  double sum = 0.0;
  for (const auto& pt : points) {
    const double r = pt.l_star - predict(fit, pt.p);
    sum += r * r;
  }
  return sum / static_cast<double>(points.size());
}

}  // namespace

double predict(const FitResult& fit, double p) {
  if (fit.model == FitResult::Model::InverseLaw) return fit.params.at(0) / (p - 1.0);
  return fit.params.at(0) * std::pow(fit.params.at(1), -p) / (p - 1.0);
}

FitResult fit_inverse_law(std::span<const LawPoint> points) {
  check_points(points, 1);
  double num = 0.0;
  double den = 0.0;
  for (const auto& pt : points) {
    const double w = 1.0 / (pt.p - 1.0);
    num += pt.l_star * w;
    den += w * w;
  }
  FitResult fit;
  fit.model = FitResult::Model::InverseLaw;
  fit.params = {num / den};
  fit.mse = mse_of(fit, points);
  return fit;
}

FitResult fit_exp_law(std::span<const LawPoint> points) {
  check_points(points, 3);
  const std::size_t n = points.size();
  // log((p-1) l*) = log k1 - p log k2.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
  Vector rhs(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double t = (points[j].p - 1.0) * points[j].l_star;
    if (!(t > 0.0)) throw NehariError(ErrorKind::NonPositiveData, "(p-1) l* must be positive for the exponential law");
    design(static_cast<Eigen::Index>(j), 0) = 1.0;
    design(static_cast<Eigen::Index>(j), 1) = -points[j].p;
    rhs[static_cast<Eigen::Index>(j)] = std::log(t);
  }
  Vector theta = design.colPivHouseholderQr().solve(rhs);  // (log k1, log k2)

  FitResult fit;
  fit.model = FitResult::Model::ExpLaw;
  auto set = [&](const Vector& t) { fit.params = {std::exp(t[0]), std::exp(t[1])}; };
  set(theta);
  double best = mse_of(fit, points);

  // Levenberg-Marquardt on the untransformed residuals in (log k1, log k2).
  double damping = 1e-3;
  for (int it = 0; it < 200 && best > 0.0; ++it) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), 2);
    Vector res(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const double m = std::exp(theta[0] - points[j].p * theta[1]) / (points[j].p - 1.0);
      res[static_cast<Eigen::Index>(j)] = points[j].l_star - m;
      jac(static_cast<Eigen::Index>(j), 0) = m;
      jac(static_cast<Eigen::Index>(j), 1) = -points[j].p * m;
    }
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d jtr = jac.transpose() * res;
    const Eigen::Vector2d step =
        (jtj + damping * Eigen::Matrix2d(jtj.diagonal().asDiagonal())).ldlt().solve(jtr);
    const Vector trial = theta + step;
    FitResult cand = fit;
    cand.params = {std::exp(trial[0]), std::exp(trial[1])};
    const double m = mse_of(cand, points);
    if (m < best) {
      const double gain = (best - m) / best;
      theta = trial;
      fit = cand;
      best = m;
      damping = std::max(damping * 0.3, 1e-12);
      if (gain < 1e-14) break;
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;
    }
  }
  fit.mse = best;
  return fit;
}

// ---------------------------------------------------------------------------
// Scaling invariance

ScalingReport scaling_symmetry_check(const EllipticProblem& problem, const Discretization& disc,
                                     const DiscreteField& u, double radius_scale) {
  if (!(radius_scale > 0.0)) throw NehariError(ErrorKind::InvalidCoefficient, "radius scale must be positive");
  ScalingReport rep;
  rep.amplitude = std::pow(radius_scale, (problem.weight_exponent() + 2.0) / (problem.p - 1.0));
  rep.mu_original = asymmetry(disc, u).mu;
  // On the grid R⁻¹Ω the node x_i / R carries R^{(l+2)/(p-1)} u(R · x_i / R).
  rep.mu_transformed = asymmetry(disc, u.scaled(rep.amplitude)).mu;
  rep.invariant = std::abs(rep.mu_transformed - rep.mu_original) <= 1e-10;
  return rep;
}

}  // namespace nehari
