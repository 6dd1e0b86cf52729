#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "lcbl/quadrature.hpp"

namespace lcbl {

enum class StencilKind { central2, central4, flux2 };

std::string_view to_string(StencilKind kind) noexcept;
StencilKind stencil_from_string(const std::string& name);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete L = Laplacian - grad f . grad on a uniform grid.
/// central2/central4: pointwise stencils, one-sided within half a stencil of
/// the boundary. flux2: conservative form -M^{-1} K with edge conductances
/// rho(midpoint) and masses m_i, exactly self-adjoint in l^2(m).
struct GeneratorMatrix {
  SparseMatrix matrix;
  StencilKind kind = StencilKind::central2;
  /// Nodes whose row uses a one-sided stencil.
  std::vector<char> one_sided;
  std::string closure;
};

GeneratorMatrix assemble_generator(const Quadrature& q, StencilKind kind);

struct GeneratorResult {
  Field values;
  std::size_t one_sided_nodes = 0;
};

/// Lh with the pointwise second-order stencil.
GeneratorResult apply_generator(const Quadrature& q, const Field& h,
                                StencilKind kind = StencilKind::central2);

struct PoissonOptions {
  StencilKind stencil = StencilKind::central4;
  double tolerance = 1e-8;
  int max_refinements = 4;
  /// Systems with more unknowns use preconditioned BiCGSTAB instead of LU.
  std::size_t direct_limit = 20000;
  int max_iterations = 2000;
};

struct PoissonSolution {
  Field u;
  /// max over equation rows of |Lu - (h - <h>)|.
  double residual = 0.0;
  /// Constant absorbed by the bordered system (discrete compatibility defect).
  double compatibility = 0.0;
  /// Relative residual of the linear system after refinement.
  double system_residual = 0.0;
  /// Refinement steps (direct) or iterations (iterative).
  int refinements = 0;
  std::string boundary;
  std::string method;
  bool clipped = false;
};

/// Solves Lu = h - <h> with <u> = 0 as the bordered sparse system
/// [L 1; m^T 0][u; c] = [h - <h>; 0]; face nodes carry one-sided Neumann rows.
PoissonSolution solve_poisson(const Quadrature& q, const Field& h, const PoissonOptions& opts = {});

/// Quadrature solution of (e^{-f} u')' = (h - <h>) e^{-f} on a 1-D grid.
PoissonSolution solve_poisson_1d_exact(const Quadrature& q, const Field& h);

/// max over interior nodes of |L(grad u) - grad(Lu) - Hess_f grad u|, using
/// second-order central differences. `region` restricts the nodes examined.
double check_commutation(const Quadrature& q, const Field& u, const std::optional<Box>& region = {});

/// Per-node eigendecomposition of Hess_f on the quadrature grid.
class SpectralField {
 public:
  explicit SpectralField(const Quadrature& q);

  int dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return lmin_.size(); }
  double lambda_min(std::size_t i) const { return lmin_[i]; }
  double lambda_max(std::size_t i) const { return lmax_[i]; }
  std::span<const double> values(std::size_t i) const { return {values_.data() + i * n_, static_cast<std::size_t>(n_)}; }
  /// Column-major n x n eigenvector block.
  std::span<const double> vectors(std::size_t i) const {
    return {vectors_.data() + i * n_ * n_, static_cast<std::size_t>(n_ * n_)};
  }
  /// |Hess^power v| at node i.
  double power_norm(std::size_t i, std::span<const double> v, double power) const;
  /// Hess^power v at node i.
  void apply_power(std::size_t i, std::span<const double> v, double power, std::span<double> out) const;
  double max_condition() const;

 private:
  int n_;
  std::vector<double> lmin_, lmax_, values_, vectors_;
};

/// Cached per-node spectrum of the quadrature's potential.
const SpectralField& spectrum_of(const Quadrature& q);

/// Same potential and box on a coarser grid when q has more than `limit`
/// nodes (the largest odd per-axis count that fits); q itself otherwise.
QuadraturePtr coarsened(const QuadraturePtr& q, std::size_t limit);

/// Parameters of a norm || lambda_min^{lam_exponent} Hess^{power} v ||_p.
struct WeightedNorm {
  double p = 2.0;
  double power = -0.5;
  double lam_exponent = 0.0;
};

/// Conjugate exponent; p = infinity maps to 1.
double conjugate_exponent(double p);

inline constexpr double kEssentialDensityFloor = 1e-14;

/// (sum_i m_i |lambda_min^e Hess^s v_i|^p)^{1/p}; for p = infinity the max over
/// nodes whose density exceeds 1e-14 of the maximum density.
double weighted_gradient_norm(const Quadrature& q, const SpectralField& spec, const VectorField& v,
                              const WeightedNorm& norm);

}  // namespace lcbl
