#include "nehari/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <fftw3.h>

namespace nehari {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Legendre P_n and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw NehariError(ErrorKind::InvalidCoefficient, "Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    // Ascending order.
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

int nonlinear_gauss_points(double p) {
  return std::max(2, static_cast<int>(std::ceil((p + 1.0) / 2.0)) + 1);
}

double abs_pow(double x, double q) noexcept {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  if (q == 1.0) return ax;
  if (q == 2.0) return ax * ax;
  if (q == 3.0) return ax * ax * ax;
  if (q == 4.0) return (ax * ax) * (ax * ax);
  return std::exp(q * std::log(ax));
}

double signed_pow(double x, double q) noexcept {
  return x < 0.0 ? -abs_pow(x, q) : abs_pow(x, q);
}

// ---------------------------------------------------------------------------
// SparseHOperator

struct SparseHOperator::Impl {
  // Tridiagonal LDLᵀ: sub[i] couples i and i-1.
  std::vector<double> sub;
  std::vector<double> pivot;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
};

SparseHOperator::SparseHOperator(Eigen::SparseMatrix<double> matrix, Backend backend, LinearSolverOptions options)
    : matrix_(std::move(matrix)), backend_(backend), options_(options), impl_(std::make_unique<Impl>()) {
  matrix_.makeCompressed();
  const Eigen::Index n = matrix_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(matrix_.coeff(i, i) > 0.0)) {
      throw NehariError(ErrorKind::AssemblyFailure, "non-positive diagonal in H operator at dof " + std::to_string(i));
    }
  }
  if (backend_ == Backend::Tridiagonal) {
    impl_->sub.assign(static_cast<std::size_t>(n), 0.0);
    impl_->pivot.assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double off = i > 0 ? matrix_.coeff(i, i - 1) : 0.0;
      double d = matrix_.coeff(i, i);
      if (i > 0) {
        impl_->sub[static_cast<std::size_t>(i)] = off / impl_->pivot[static_cast<std::size_t>(i - 1)];
        d -= off * impl_->sub[static_cast<std::size_t>(i)];
      }
      if (!(d > 0.0)) {
        throw NehariError(ErrorKind::AssemblyFailure, "H operator is not positive definite (pivot " + fmt17(d) + ")");
      }
      impl_->pivot[static_cast<std::size_t>(i)] = d;
    }
  } else {
    const int max_iter = options_.max_iterations > 0 ? options_.max_iterations : static_cast<int>(10 * n);
    impl_->cg.setTolerance(options_.tolerance);
    impl_->cg.setMaxIterations(max_iter);
    impl_->cg.compute(matrix_);
    if (impl_->cg.info() != Eigen::Success) {
      throw NehariError(ErrorKind::AssemblyFailure, "incomplete Cholesky preconditioner failed");
    }
  }
}

SparseHOperator::~SparseHOperator() = default;

Vector SparseHOperator::apply(const Vector& x) const { return matrix_ * x; }

Vector SparseHOperator::solve(const Vector& rhs) const {
  const Eigen::Index n = matrix_.rows();
  if (rhs.size() != n) throw NehariError(ErrorKind::MeshMismatch, "rhs size does not match operator");
  if (rhs.isZero(0.0)) return Vector::Zero(n);
  if (backend_ == Backend::Tridiagonal) {
    Vector y = rhs;
    for (Eigen::Index i = 1; i < n; ++i) y[i] -= impl_->sub[static_cast<std::size_t>(i)] * y[i - 1];
    for (Eigen::Index i = 0; i < n; ++i) y[i] /= impl_->pivot[static_cast<std::size_t>(i)];
    for (Eigen::Index i = n - 2; i >= 0; --i) y[i] -= impl_->sub[static_cast<std::size_t>(i + 1)] * y[i + 1];
    return y;
  }
  Vector x = impl_->cg.solve(rhs);
  if (impl_->cg.info() != Eigen::Success || !x.allFinite()) {
    throw NehariError(ErrorKind::LinearSolveFailure,
                      "conjugate gradients stopped after " + std::to_string(impl_->cg.iterations()) +
                          " iterations with relative residual " + fmt17(impl_->cg.error()));
  }
  return x;
}

// ---------------------------------------------------------------------------
// Discretization helpers

DiscreteField Discretization::make_field(Vector coeffs) const {
  if (coeffs.size() != dof_count()) {
    throw NehariError(ErrorKind::MeshMismatch, "expected " + std::to_string(dof_count()) + " coefficients for '" +
                                                   mesh_id() + "', got " + std::to_string(coeffs.size()));
  }
  return DiscreteField(mesh_id(), std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Mesh1D

Mesh1D::Mesh1D(int n_elements) : n_elements_(n_elements) {
  if (n_elements < 2) throw NehariError(ErrorKind::InvalidCoefficient, "1D mesh needs at least 2 elements");
}

std::string Mesh1D::mesh_id() const { return "interval " + std::to_string(n_elements_); }

std::vector<Point> Mesh1D::nodes() const {
  std::vector<Point> pts(static_cast<std::size_t>(n_elements_ - 1));
  for (int i = 1; i < n_elements_; ++i) pts[static_cast<std::size_t>(i - 1)] = {-1.0 + i * h(), 0.0};
  return pts;
}

QuadratureTable Mesh1D::quadrature(int points_per_direction) const {
  const GaussRule rule = gauss_legendre(points_per_direction);
  const std::size_t nq = rule.nodes.size();
  QuadratureTable table;
  table.support = 2;
  const std::size_t total = static_cast<std::size_t>(n_elements_) * nq;
  table.weight.reserve(total);
  table.point.reserve(total);
  table.dof.reserve(2 * total);
  table.basis.reserve(2 * total);
  const double hh = h();
  for (int e = 0; e < n_elements_; ++e) {
    const double x0 = -1.0 + e * hh;
    const int left = e == 0 ? -1 : e - 1;
    const int right = e == n_elements_ - 1 ? -1 : e;
    for (std::size_t q = 0; q < nq; ++q) {
      const double xi = rule.nodes[q];
      table.weight.push_back(0.5 * hh * rule.weights[q]);
      table.point.push_back({x0 + 0.5 * (xi + 1.0) * hh, 0.0});
      table.dof.push_back(left);
      table.dof.push_back(right);
      table.basis.push_back(0.5 * (1.0 - xi));
      table.basis.push_back(0.5 * (1.0 + xi));
    }
  }
  return table;
}

std::unique_ptr<HOperator> Mesh1D::assemble(const PotentialCoefficient& a, const LinearSolverOptions& options) const {
  const int n = n_elements_ - 1;
  const double hh = h();
  const GaussRule rule = gauss_legendre(3);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(4 * n_elements_));
  for (int e = 0; e < n_elements_; ++e) {
    const int dofs[2] = {e - 1, e == n_elements_ - 1 ? -1 : e};
    double local[2][2] = {{1.0 / hh, -1.0 / hh}, {-1.0 / hh, 1.0 / hh}};
    if (!a.is_zero()) {
      const double x0 = -1.0 + e * hh;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double xi = rule.nodes[q];
        const double w = 0.5 * hh * rule.weights[q] * a({x0 + 0.5 * (xi + 1.0) * hh, 0.0});
        const double phi[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) local[r][c] += w * phi[r] * phi[c];
      }
    }
    for (int r = 0; r < 2; ++r) {
      if (dofs[r] < 0) continue;
      for (int c = 0; c < 2; ++c) {
        if (dofs[c] < 0) continue;
        trip.emplace_back(dofs[r], dofs[c], local[r][c]);
      }
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return std::make_unique<SparseHOperator>(std::move(m), SparseHOperator::Backend::Tridiagonal, options);
}

// ---------------------------------------------------------------------------
// Grid2DSquare

Grid2DSquare::Grid2DSquare(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) throw NehariError(ErrorKind::InvalidCoefficient, "square grid needs at least 2x2 elements");
}

std::string Grid2DSquare::mesh_id() const { return "square " + std::to_string(nx_) + " " + std::to_string(ny_); }

int Grid2DSquare::dof_of(int i, int j) const noexcept {
  if (i <= 0 || j <= 0 || i >= nx_ || j >= ny_) return -1;
  return (j - 1) * (nx_ - 1) + (i - 1);
}

std::vector<Point> Grid2DSquare::nodes() const {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(dof_count()));
  const double hx = 2.0 / nx_;
  const double hy = 2.0 / ny_;
  for (int j = 1; j < ny_; ++j)
    for (int i = 1; i < nx_; ++i) pts.push_back({-1.0 + i * hx, -1.0 + j * hy});
  return pts;
}

QuadratureTable Grid2DSquare::quadrature(int points_per_direction) const {
  const GaussRule rule = gauss_legendre(points_per_direction);
  const std::size_t nq = rule.nodes.size();
  const double hx = 2.0 / nx_;
  const double hy = 2.0 / ny_;
  QuadratureTable table;
  table.support = 4;
  const std::size_t total = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) * nq * nq;
  table.weight.reserve(total);
  table.point.reserve(total);
  table.dof.reserve(4 * total);
  table.basis.reserve(4 * total);
  for (int ey = 0; ey < ny_; ++ey) {
    for (int ex = 0; ex < nx_; ++ex) {
      const int dofs[4] = {dof_of(ex, ey), dof_of(ex + 1, ey), dof_of(ex, ey + 1), dof_of(ex + 1, ey + 1)};
      const double x0 = -1.0 + ex * hx;
      const double y0 = -1.0 + ey * hy;
      for (std::size_t qy = 0; qy < nq; ++qy) {
        const double eta = rule.nodes[qy];
        for (std::size_t qx = 0; qx < nq; ++qx) {
          const double xi = rule.nodes[qx];
          table.weight.push_back(0.25 * hx * hy * rule.weights[qx] * rule.weights[qy]);
          table.point.push_back({x0 + 0.5 * (xi + 1.0) * hx, y0 + 0.5 * (eta + 1.0) * hy});
          const double bx[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
          const double by[2] = {0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
          for (int k = 0; k < 4; ++k) {
            table.dof.push_back(dofs[k]);
            table.basis.push_back(bx[k & 1] * by[k >> 1]);
          }
        }
      }
    }
  }
  return table;
}

std::unique_ptr<HOperator> Grid2DSquare::assemble(const PotentialCoefficient& a,
                                                  const LinearSolverOptions& options) const {
  const double hx = 2.0 / nx_;
  const double hy = 2.0 / ny_;
  const GaussRule rule = gauss_legendre(3);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) * 16);
  for (int ey = 0; ey < ny_; ++ey) {
    for (int ex = 0; ex < nx_; ++ex) {
      const int dofs[4] = {dof_of(ex, ey), dof_of(ex + 1, ey), dof_of(ex, ey + 1), dof_of(ex + 1, ey + 1)};
      double local[4][4] = {};
      const double x0 = -1.0 + ex * hx;
      const double y0 = -1.0 + ey * hy;
      for (std::size_t qy = 0; qy < rule.nodes.size(); ++qy) {
        const double eta = rule.nodes[qy];
        for (std::size_t qx = 0; qx < rule.nodes.size(); ++qx) {
          const double xi = rule.nodes[qx];
          const double w = 0.25 * hx * hy * rule.weights[qx] * rule.weights[qy];
          const double bx[2] = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
          const double by[2] = {0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
          const double dbx[2] = {-1.0 / hx, 1.0 / hx};
          const double dby[2] = {-1.0 / hy, 1.0 / hy};
          const double av = a({x0 + 0.5 * (xi + 1.0) * hx, y0 + 0.5 * (eta + 1.0) * hy});
          for (int r = 0; r < 4; ++r) {
            const double phr = bx[r & 1] * by[r >> 1];
            const double gxr = dbx[r & 1] * by[r >> 1];
            const double gyr = bx[r & 1] * dby[r >> 1];
            for (int c = 0; c < 4; ++c) {
              const double phc = bx[c & 1] * by[c >> 1];
              const double gxc = dbx[c & 1] * by[c >> 1];
              const double gyc = bx[c & 1] * dby[c >> 1];
              local[r][c] += w * (gxr * gxc + gyr * gyc + av * phr * phc);
            }
          }
        }
      }
      for (int r = 0; r < 4; ++r) {
        if (dofs[r] < 0) continue;
        for (int c = 0; c < 4; ++c) {
          if (dofs[c] < 0) continue;
          trip.emplace_back(dofs[r], dofs[c], local[r][c]);
        }
      }
    }
  }
  const Eigen::Index n = dof_count();
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return std::make_unique<SparseHOperator>(std::move(m), SparseHOperator::Backend::PreconditionedCg, options);
}

// ---------------------------------------------------------------------------
// DiskGrid

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// W·(-Δ_h + a) on the polar grid. Each Fourier mode m of the angular
/// direction reduces to a tridiagonal radial operator L_m, so applying and
/// inverting cost one real FFT per ring plus O(n_r) work per mode.
class DiskHOperator final : public HOperator {
 public:
  DiskHOperator(const DiskGrid& grid, std::vector<double> a_ring)
      : n_theta_(grid.n_theta()), n_r_(grid.n_r()), modes_(grid.n_theta() / 2 + 1), a_ring_(std::move(a_ring)) {
    const double dr = grid.dr();
    const double dtheta = 2.0 * std::numbers::pi / n_theta_;
    const std::size_t nr = static_cast<std::size_t>(n_r_);
    lower_.resize(nr);
    upper_.resize(nr);
    radial_diag_.resize(nr);
    inv_r2_.resize(nr);
    ring_weight_.resize(nr);
    for (int j = 0; j < n_r_; ++j) {
      const double r = grid.radius(j);
      const double r_minus = j == 0 ? 0.0 : r - 0.5 * dr;
      const double r_plus = r + 0.5 * dr;
      const double scale = 1.0 / (r * dr * dr);
      lower_[static_cast<std::size_t>(j)] = -r_minus * scale;
      upper_[static_cast<std::size_t>(j)] = j + 1 < n_r_ ? -r_plus * scale : 0.0;
      radial_diag_[static_cast<std::size_t>(j)] = (r_minus + r_plus) * scale + a_ring_[static_cast<std::size_t>(j)];
      inv_r2_[static_cast<std::size_t>(j)] = 1.0 / (r * r);
      ring_weight_[static_cast<std::size_t>(j)] = r * dr * dtheta;
    }
    // Thomas factors per mode.
    cprime_.assign(static_cast<std::size_t>(modes_) * nr, 0.0);
    denom_.assign(static_cast<std::size_t>(modes_) * nr, 0.0);
    for (int m = 0; m < modes_; ++m) {
      const double kappa = static_cast<double>(m) * m;
      double prev_c = 0.0;
      for (int j = 0; j < n_r_; ++j) {
        const std::size_t idx = static_cast<std::size_t>(m) * nr + static_cast<std::size_t>(j);
        const double diag = diagonal(m, j, kappa);
        const double den = diag - (j > 0 ? lower_[static_cast<std::size_t>(j)] * prev_c : 0.0);
        if (!(den > 0.0)) {
          throw NehariError(ErrorKind::AssemblyFailure,
                            "polar H operator is not positive definite in Fourier mode " + std::to_string(m));
        }
        denom_[idx] = den;
        prev_c = upper_[static_cast<std::size_t>(j)] / den;
        cprime_[idx] = prev_c;
      }
    }
    std::lock_guard lock(fftw_planner_mutex());
    double* in = fftw_alloc_real(static_cast<std::size_t>(n_theta_));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(modes_));
    forward_ = fftw_plan_dft_r2c_1d(n_theta_, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_c2r_1d(n_theta_, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  }

  ~DiskHOperator() override {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  DiskHOperator(const DiskHOperator&) = delete;
  DiskHOperator& operator=(const DiskHOperator&) = delete;

  [[nodiscard]] Eigen::Index size() const noexcept override {
    return static_cast<Eigen::Index>(n_theta_) * n_r_;
  }

  [[nodiscard]] Vector apply(const Vector& x) const override {
    check_size(x);
    auto spec = forward(x);
    std::vector<std::complex<double>> col(static_cast<std::size_t>(n_r_));
    for (int m = 0; m < modes_; ++m) {
      const double kappa = static_cast<double>(m) * m;
      for (int j = 0; j < n_r_; ++j) col[static_cast<std::size_t>(j)] = spec[index(j, m)];
      for (int j = 0; j < n_r_; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        std::complex<double> v = diagonal(m, j, kappa) * col[sj];
        if (j > 0) v += lower_[sj] * col[sj - 1];
        if (j + 1 < n_r_) v += upper_[sj] * col[sj + 1];
        spec[index(j, m)] = v;
      }
    }
    Vector y = backward(spec);
    for (int j = 0; j < n_r_; ++j) y.segment(static_cast<Eigen::Index>(j) * n_theta_, n_theta_) *= ring_weight_[static_cast<std::size_t>(j)];
    return y;
  }

  [[nodiscard]] Vector solve(const Vector& rhs) const override {
    check_size(rhs);
    Vector scaled = rhs;
    for (int j = 0; j < n_r_; ++j) scaled.segment(static_cast<Eigen::Index>(j) * n_theta_, n_theta_) /= ring_weight_[static_cast<std::size_t>(j)];
    auto spec = forward(scaled);
    const std::size_t nr = static_cast<std::size_t>(n_r_);
    for (int m = 0; m < modes_; ++m) {
      const std::size_t base = static_cast<std::size_t>(m) * nr;
      // Forward sweep.
      std::complex<double> prev{};
      for (int j = 0; j < n_r_; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        std::complex<double> d = spec[index(j, m)];
        if (j > 0) d -= lower_[sj] * prev;
        prev = d / denom_[base + sj];
        spec[index(j, m)] = prev;
      }
      for (int j = n_r_ - 2; j >= 0; --j) {
        spec[index(j, m)] -= cprime_[base + static_cast<std::size_t>(j)] * spec[index(j + 1, m)];
      }
    }
    Vector y = backward(spec);
    if (!y.allFinite()) throw NehariError(ErrorKind::LinearSolveFailure, "polar solve produced non-finite values");
    return y;
  }

 private:
  [[nodiscard]] double diagonal(int /*m*/, int j, double kappa) const noexcept {
    return radial_diag_[static_cast<std::size_t>(j)] + kappa * inv_r2_[static_cast<std::size_t>(j)];
  }

  [[nodiscard]] std::size_t index(int j, int m) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(m);
  }

  void check_size(const Vector& x) const {
    if (x.size() != size()) throw NehariError(ErrorKind::MeshMismatch, "vector size does not match polar grid");
  }

  [[nodiscard]] std::vector<std::complex<double>> forward(const Vector& x) const {
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n_r_) * static_cast<std::size_t>(modes_));
    std::vector<double> ring(static_cast<std::size_t>(n_theta_));
    for (int j = 0; j < n_r_; ++j) {
      for (int k = 0; k < n_theta_; ++k) ring[static_cast<std::size_t>(k)] = x[static_cast<Eigen::Index>(j) * n_theta_ + k];
      fftw_execute_dft_r2c(forward_, ring.data(), reinterpret_cast<fftw_complex*>(&spec[index(j, 0)]));
    }
    return spec;
  }

  [[nodiscard]] Vector backward(std::vector<std::complex<double>>& spec) const {
    Vector y(size());
    std::vector<double> ring(static_cast<std::size_t>(n_theta_));
    const double norm = 1.0 / n_theta_;
    for (int j = 0; j < n_r_; ++j) {
      // Drop the roundoff imaginary parts that c2r would otherwise interpret.
      spec[index(j, 0)].imag(0.0);
      if (n_theta_ % 2 == 0) spec[index(j, modes_ - 1)].imag(0.0);
      fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(&spec[index(j, 0)]), ring.data());
      for (int k = 0; k < n_theta_; ++k) y[static_cast<Eigen::Index>(j) * n_theta_ + k] = ring[static_cast<std::size_t>(k)] * norm;
    }
    return y;
  }

  int n_theta_;
  int n_r_;
  int modes_;
  std::vector<double> a_ring_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> radial_diag_;
  std::vector<double> inv_r2_;
  std::vector<double> ring_weight_;
  std::vector<double> cprime_;
  std::vector<double> denom_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

DiskGrid::DiskGrid(int n_theta, int n_r) : n_theta_(n_theta), n_r_(n_r) {
  if (n_theta < 4 || n_theta % 2 != 0) {
    throw NehariError(ErrorKind::InvalidCoefficient, "disk grid needs an even n_theta >= 4");
  }
  if (n_r < 2) throw NehariError(ErrorKind::InvalidCoefficient, "disk grid needs n_r >= 2");
}

std::string DiskGrid::mesh_id() const { return "disk " + std::to_string(n_theta_) + " " + std::to_string(n_r_); }

double DiskGrid::angle(int k) const noexcept { return 2.0 * std::numbers::pi * k / n_theta_; }

std::vector<Point> DiskGrid::nodes() const {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(dof_count()));
  for (int j = 0; j < n_r_; ++j) {
    const double r = radius(j);
    for (int k = 0; k < n_theta_; ++k) pts.push_back({r * std::cos(angle(k)), r * std::sin(angle(k))});
  }
  return pts;
}

QuadratureTable DiskGrid::quadrature(int /*points_per_direction*/) const {
  QuadratureTable table;
  table.support = 1;
  const auto pts = nodes();
  const double dtheta = 2.0 * std::numbers::pi / n_theta_;
  table.point = pts;
  table.weight.resize(pts.size());
  table.dof.resize(pts.size());
  table.basis.assign(pts.size(), 1.0);
  for (int j = 0; j < n_r_; ++j) {
    for (int k = 0; k < n_theta_; ++k) {
      const std::size_t i = static_cast<std::size_t>(j) * static_cast<std::size_t>(n_theta_) + static_cast<std::size_t>(k);
      table.weight[i] = radius(j) * dr() * dtheta;
      table.dof[i] = static_cast<int>(i);
    }
  }
  return table;
}

std::unique_ptr<HOperator> DiskGrid::assemble(const PotentialCoefficient& a, const LinearSolverOptions& /*options*/) const {
  // Every supported potential is radial, so sampling along θ = 0 suffices.
  std::vector<double> a_ring(static_cast<std::size_t>(n_r_));
  for (int j = 0; j < n_r_; ++j) a_ring[static_cast<std::size_t>(j)] = a({radius(j), 0.0});
  return std::make_unique<DiskHOperator>(*this, std::move(a_ring));
}

std::shared_ptr<const Discretization> make_discretization(DomainKind domain, const Resolution& res) {
  switch (domain) {
    case DomainKind::Interval: return std::make_shared<Mesh1D>(res.n_elements);
    case DomainKind::Square: return std::make_shared<Grid2DSquare>(res.nx, res.ny);
    case DomainKind::Disk: return std::make_shared<DiskGrid>(res.n_theta, res.n_r);
  }
  throw NehariError(ErrorKind::ConfigError, "unknown domain");
}

// ---------------------------------------------------------------------------
// Nonlinear quadrature

double nonlinear_integral(const QuadratureTable& table, const std::vector<double>& g_weighted, const Vector& u,
                          double q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (g_weighted[i] == 0.0) continue;
    sum += g_weighted[i] * abs_pow(table.interpolate(u, i), q);
  }
  return sum;
}

Vector nonlinear_load(const QuadratureTable& table, const std::vector<double>& g_weighted, const Vector& u, double p) {
  Vector b = Vector::Zero(u.size());
  const int s = table.support;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (g_weighted[i] == 0.0) continue;
    const double f = g_weighted[i] * signed_pow(table.interpolate(u, i), p);
    const std::size_t base = i * static_cast<std::size_t>(s);
    for (int k = 0; k < s; ++k) {
      const int d = table.dof[base + k];
      if (d >= 0) b[d] += f * table.basis[base + k];
    }
  }
  return b;
}

Vector nonlinear_weighted_apply(const QuadratureTable& table, const std::vector<double>& g_weighted, const Vector& u,
                                double p, const Vector& w) {
  Vector b = Vector::Zero(u.size());
  const int s = table.support;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (g_weighted[i] == 0.0) continue;
    const double f = g_weighted[i] * abs_pow(table.interpolate(u, i), p - 1.0) * table.interpolate(w, i);
    const std::size_t base = i * static_cast<std::size_t>(s);
    for (int k = 0; k < s; ++k) {
      const int d = table.dof[base + k];
      if (d >= 0) b[d] += f * table.basis[base + k];
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Initial guess and field dump

DiscreteField sample_initial_guess(const Discretization& disc) {
  switch (disc.domain()) {
    case DomainKind::Interval:
      return disc.interpolate([](Point pt) { return (pt.x - 1.0) * (pt.x - 1.0) * (pt.x + 1.0); });
    case DomainKind::Square:
      return disc.interpolate([](Point pt) { return (1.0 - pt.x * pt.x) * (1.0 - pt.y * pt.y); });
    case DomainKind::Disk:
      return disc.interpolate([](Point pt) { return (1.0 - radius_sq(pt)) * std::exp(2.0 * pt.x + pt.y); });
  }
  throw NehariError(ErrorKind::ConfigError, "unknown domain");
}

void write_field(std::ostream& out, const Discretization& disc, const DiscreteField& field) {
  if (field.mesh_id() != disc.mesh_id()) {
    throw NehariError(ErrorKind::MeshMismatch, "field on '" + field.mesh_id() + "' written with '" + disc.mesh_id() + "'");
  }
  out << disc.mesh_id() << '\n';
  const auto pts = disc.nodes();
  const bool one_d = disc.domain() == DomainKind::Interval;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << fmt17(pts[i].x) << ' ';
    if (!one_d) out << fmt17(pts[i].y) << ' ';
    out << fmt17(field.coeffs()[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

FieldDump read_field(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw NehariError(ErrorKind::IoError, "empty field dump");
  std::istringstream hs(header);
  std::string kind;
  hs >> kind;
  Resolution res;
  DomainKind domain;
  try {
    domain = parse_domain(kind);
  } catch (const NehariError&) {
    throw NehariError(ErrorKind::IoError, "unknown domain in field header '" + header + "'");
  }
  bool ok = false;
  switch (domain) {
    case DomainKind::Interval: ok = static_cast<bool>(hs >> res.n_elements); break;
    case DomainKind::Square: ok = static_cast<bool>(hs >> res.nx >> res.ny); break;
    case DomainKind::Disk: ok = static_cast<bool>(hs >> res.n_theta >> res.n_r); break;
  }
  if (!ok) throw NehariError(ErrorKind::IoError, "malformed field header '" + header + "'");
  const auto disc = make_discretization(domain, res);
  const Eigen::Index n = disc->dof_count();
  const int columns = domain == DomainKind::Interval ? 2 : 3;
  Vector values(n);
  std::string line;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw NehariError(ErrorKind::IoError, "field dump truncated at dof " + std::to_string(i));
    }
    std::istringstream ls(line);
    std::string token;
    int count = 0;
    double last = 0.0;
    while (ls >> token) {
      char* end = nullptr;
      last = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw NehariError(ErrorKind::IoError, "bad number '" + token + "' in field dump");
      }
      ++count;
    }
    if (count != columns) {
      throw NehariError(ErrorKind::IoError, "expected " + std::to_string(columns) + " columns on line " +
                                                std::to_string(i + 2));
    }
    values[i] = last;
  }
  return {domain, res, disc->make_field(std::move(values))};
}

}  // namespace nehari
