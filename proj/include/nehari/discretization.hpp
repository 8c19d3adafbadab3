#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "nehari/field.hpp"
#include "nehari/problem.hpp"

namespace nehari {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Smallest per-direction Gauss point count for the nonlinear terms:
/// max(2, ceil((p+1)/2) + 1).
int nonlinear_gauss_points(double p);

/// Flattened quadrature: each point carries its weight (Jacobian included),
/// location, and the basis functions that are nonzero there. Boundary nodes
/// have dof -1 and are skipped.
struct QuadratureTable {
  int support = 0;
  std::vector<double> weight;
  std::vector<Point> point;
  std::vector<int> dof;
  std::vector<double> basis;

  [[nodiscard]] std::size_t size() const noexcept { return weight.size(); }

  /// u_h at quadrature point q.
  [[nodiscard]] double interpolate(const Vector& u, std::size_t q) const noexcept {
    double value = 0.0;
    const std::size_t base = q * static_cast<std::size_t>(support);
    for (int k = 0; k < support; ++k) {
      const int d = dof[base + k];
      if (d >= 0) value += basis[base + k] * u[d];
    }
    return value;
  }
};

struct LinearSolverOptions {
  /// Relative residual target for iterative solves; direct solves ignore it.
  double tolerance = 1e-10;
  /// 0 selects 10 * dof.
  int max_iterations = 0;
};

/// The SPD operator of (u,v)_H = ∫ ∇u·∇v + a u v on interior dofs.
class HOperator {
 public:
  virtual ~HOperator() = default;

  [[nodiscard]] virtual Eigen::Index size() const noexcept = 0;
  [[nodiscard]] virtual Vector apply(const Vector& x) const = 0;
  /// Throws LinearSolveFailure.
  [[nodiscard]] virtual Vector solve(const Vector& rhs) const = 0;

  [[nodiscard]] double inner(const Vector& u, const Vector& v) const { return u.dot(apply(v)); }
};

/// Assembled sparse operator; 1D meshes use tridiagonal elimination, 2D
/// meshes use conjugate gradients with an incomplete Cholesky preconditioner.
class SparseHOperator final : public HOperator {
 public:
  enum class Backend { Tridiagonal, PreconditionedCg };

  SparseHOperator(Eigen::SparseMatrix<double> matrix, Backend backend, LinearSolverOptions options);
  ~SparseHOperator() override;

  [[nodiscard]] Eigen::Index size() const noexcept override { return matrix_.rows(); }
  [[nodiscard]] Vector apply(const Vector& x) const override;
  [[nodiscard]] Vector solve(const Vector& rhs) const override;

  [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }
  [[nodiscard]] Backend backend() const noexcept { return backend_; }

 private:
  struct Impl;
  Eigen::SparseMatrix<double> matrix_;
  Backend backend_;
  LinearSolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

class Discretization {
 public:
  virtual ~Discretization() = default;

  [[nodiscard]] virtual DomainKind domain() const noexcept = 0;
  /// Also the first line of the field dump, e.g. "interval 1000".
  [[nodiscard]] virtual std::string mesh_id() const = 0;
  [[nodiscard]] virtual Eigen::Index dof_count() const noexcept = 0;
  /// Coordinates of the interior dofs, in dof order.
  [[nodiscard]] virtual std::vector<Point> nodes() const = 0;
  [[nodiscard]] virtual QuadratureTable quadrature(int points_per_direction) const = 0;
  /// Throws AssemblyFailure when the result is not SPD.
  [[nodiscard]] virtual std::unique_ptr<HOperator> assemble(const PotentialCoefficient& a,
                                                            const LinearSolverOptions& options) const = 0;

  [[nodiscard]] DiscreteField make_field(Vector coeffs) const;
  template <class Fn>
  [[nodiscard]] DiscreteField interpolate(Fn&& fn) const {
    const auto pts = nodes();
    Vector c(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) c[static_cast<Eigen::Index>(i)] = fn(pts[i]);
    return make_field(std::move(c));
  }
};

/// P1 elements on a uniform mesh of (-1, 1).
class Mesh1D final : public Discretization {
 public:
  explicit Mesh1D(int n_elements);

  [[nodiscard]] DomainKind domain() const noexcept override { return DomainKind::Interval; }
  [[nodiscard]] std::string mesh_id() const override;
  [[nodiscard]] Eigen::Index dof_count() const noexcept override { return n_elements_ - 1; }
  [[nodiscard]] std::vector<Point> nodes() const override;
  [[nodiscard]] QuadratureTable quadrature(int points_per_direction) const override;
  [[nodiscard]] std::unique_ptr<HOperator> assemble(const PotentialCoefficient& a,
                                                    const LinearSolverOptions& options) const override;

  [[nodiscard]] int n_elements() const noexcept { return n_elements_; }
  [[nodiscard]] double h() const noexcept { return 2.0 / n_elements_; }

 private:
  int n_elements_;
};

/// Q1 elements on a uniform nx-by-ny grid of (-1, 1)².
class Grid2DSquare final : public Discretization {
 public:
  Grid2DSquare(int nx, int ny);

  [[nodiscard]] DomainKind domain() const noexcept override { return DomainKind::Square; }
  [[nodiscard]] std::string mesh_id() const override;
  [[nodiscard]] Eigen::Index dof_count() const noexcept override {
    return static_cast<Eigen::Index>(nx_ - 1) * (ny_ - 1);
  }
  [[nodiscard]] std::vector<Point> nodes() const override;
  [[nodiscard]] QuadratureTable quadrature(int points_per_direction) const override;
  [[nodiscard]] std::unique_ptr<HOperator> assemble(const PotentialCoefficient& a,
                                                    const LinearSolverOptions& options) const override;

  [[nodiscard]] int nx() const noexcept { return nx_; }
  [[nodiscard]] int ny() const noexcept { return ny_; }
  /// Interior dof of grid node (i, j), or -1 on the boundary.
  [[nodiscard]] int dof_of(int i, int j) const noexcept;

 private:
  int nx_;
  int ny_;
};

/// Polar grid on the unit disk: n_theta uniform angles (Fourier collocation)
/// times n_r radii r_j = (j + 1/2) Δr with Δr = 1 / (n_r + 1/2), so the
/// Dirichlet ring r = 1 sits one step past the last unknown and the pole is
/// never a grid point. Dof index = j * n_theta + k.
class DiskGrid final : public Discretization {
 public:
  DiskGrid(int n_theta, int n_r);

  [[nodiscard]] DomainKind domain() const noexcept override { return DomainKind::Disk; }
  [[nodiscard]] std::string mesh_id() const override;
  [[nodiscard]] Eigen::Index dof_count() const noexcept override {
    return static_cast<Eigen::Index>(n_theta_) * n_r_;
  }
  [[nodiscard]] std::vector<Point> nodes() const override;
  /// One point per dof with weight r_j Δr Δθ; the order argument is ignored.
  [[nodiscard]] QuadratureTable quadrature(int points_per_direction) const override;
  /// Direct solve: FFT in θ, tridiagonal elimination per Fourier mode.
  [[nodiscard]] std::unique_ptr<HOperator> assemble(const PotentialCoefficient& a,
                                                    const LinearSolverOptions& options) const override;

  [[nodiscard]] int n_theta() const noexcept { return n_theta_; }
  [[nodiscard]] int n_r() const noexcept { return n_r_; }
  [[nodiscard]] double dr() const noexcept { return 1.0 / (n_r_ + 0.5); }
  [[nodiscard]] double radius(int j) const noexcept { return (j + 0.5) * dr(); }
  [[nodiscard]] double angle(int k) const noexcept;

 private:
  int n_theta_;
  int n_r_;
};

struct Resolution {
  int n_elements = 1000;
  int nx = 100;
  int ny = 100;
  int n_theta = 64;
  int n_r = 64;
};

std::shared_ptr<const Discretization> make_discretization(DomainKind domain, const Resolution& res);

/// ∫ g |u_h|^q over the table; g_weighted[q] holds w_q g(x_q).
double nonlinear_integral(const QuadratureTable& table, const std::vector<double>& g_weighted,
                          const Vector& u, double q);

/// b_i = ∫ g |u_h|^{p-1} u_h φ_i.
Vector nonlinear_load(const QuadratureTable& table, const std::vector<double>& g_weighted,
                      const Vector& u, double p);

/// (N w)_i = ∫ g |u_h|^{p-1} w_h φ_i.
Vector nonlinear_weighted_apply(const QuadratureTable& table, const std::vector<double>& g_weighted,
                                const Vector& u, double p, const Vector& w);

/// |x|^q with the odd/even extension conventions used throughout:
/// signed_pow(x, q) = sign(x)|x|^q, abs_pow(0, q) = 0.
double abs_pow(double x, double q) noexcept;
double signed_pow(double x, double q) noexcept;

/// Paper initial guess v₀: (x-1)²(x+1), (1-x²)(1-y²), (1-x²-y²)e^{2x+y}.
DiscreteField sample_initial_guess(const Discretization& disc);

/// Plain-text dump: header line = mesh id, then one line per dof with the
/// node coordinates and the value, all at 17 significant digits.
void write_field(std::ostream& out, const Discretization& disc, const DiscreteField& field);

struct FieldDump {
  DomainKind domain;
  Resolution resolution;
  DiscreteField field;
};
/// Throws IoError on malformed input.
FieldDump read_field(std::istream& in);

}  // namespace nehari
