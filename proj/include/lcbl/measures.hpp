#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcbl/grid.hpp"
#include "lcbl/linalg.hpp"

namespace lcbl {

enum class PotentialKind { gaussian, radial, quadratic_form, custom, regularized };

std::string_view to_string(PotentialKind kind) noexcept;

/// phi, phi', phi'' for f(x) = phi(|x|^2).
struct RadialProfile {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> ddphi;
};

/// Profiles by name: "s/2", "s^2", "s^2+s", "cosh-radial".
RadialProfile radial_profile(const std::string& name);
/// phi(s) = a s + b s^2.
RadialProfile polynomial_profile(double a, double b);

/// A C^2 convex potential f with value, gradient and Hessian evaluators.
/// Immutable; evaluators are safe to call concurrently.
class Potential {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;
  using HessianFn = std::function<Mat(const Vec&)>;

  Potential(int dimension, PotentialKind kind, std::string name, ValueFn value,
            GradientFn gradient, HessianFn hessian, bool fd_hessian = false);

  int dimension() const noexcept { return n_; }
  PotentialKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  /// True when the Hessian comes from finite differences of the gradient.
  bool fd_hessian() const noexcept { return fd_hessian_; }

  double value(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const { return gradient_(x); }
  Mat hessian(const Vec& x) const { return hessian_(x); }

  /// Precision matrix when the measure is exactly Gaussian (gaussian and
  /// quadratic-form kinds); used for exact sampling.
  const std::optional<Mat>& gaussian_precision() const noexcept { return precision_; }
  const std::optional<RadialProfile>& radial() const noexcept { return radial_; }

  Potential with_precision(Mat precision) const;
  Potential with_radial(RadialProfile profile) const;

 private:
  int n_;
  PotentialKind kind_;
  std::string name_;
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  bool fd_hessian_;
  std::optional<Mat> precision_;
  std::optional<RadialProfile> radial_;
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// Standard Gaussian f = |x|^2/2 + (n/2) ln 2 pi.
PotentialPtr make_gaussian(int n);
PotentialPtr make_radial(RadialProfile profile, int n);
/// f = x^T A x / 2 + (n/2) ln 2 pi - (1/2) ln det A (normalized).
PotentialPtr make_quadratic(const Mat& a);
/// f = sum_i cosh(x_i), unnormalized.
PotentialPtr make_cosh(int n);
/// Missing gradient or Hessian evaluators are replaced by central differences.
PotentialPtr make_custom(int n, std::string name, Potential::ValueFn value,
                         Potential::GradientFn gradient = {}, Potential::HessianFn hessian = {});
/// f + eps |x|^2.
PotentialPtr regularize(const PotentialPtr& p, double eps);

struct HessianSpectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Vec values;
  Mat basis;
};

/// Throws convexity-violation when lambda_min <= 1e-12.
HessianSpectrum hessian_spectrum_at(const Potential& p, const Vec& x);

inline constexpr double kMinEigenvalue = 1e-12;

enum class MeasureForm { smooth, piecewise1d };

/// Normalized probability measure: e^{-f - logZ} on a working box, or a
/// piecewise-constant density on [b_0, b_K].
class Measure {
 public:
  static Measure smooth(PotentialPtr potential, double log_z, Box box, double residual);
  static Measure piecewise(std::vector<double> breakpoints, std::vector<double> densities);

  MeasureForm form() const noexcept { return form_; }
  bool is_smooth() const noexcept { return form_ == MeasureForm::smooth; }
  int dimension() const noexcept { return box_.dimension(); }
  const Box& box() const noexcept { return box_; }
  double normalization_residual() const noexcept { return residual_; }
  const std::string& name() const noexcept { return name_; }
  /// False for piecewise densities that are not log-concave (zero cells
  /// between positive ones, or non-unimodal steps).
  bool log_concave() const noexcept { return log_concave_; }

  /// Throws unsupported-form for piecewise measures.
  const Potential& potential() const;
  const PotentialPtr& potential_ptr() const noexcept { return potential_; }
  double log_z() const noexcept { return log_z_; }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& densities() const noexcept { return densities_; }

  double density(const Vec& x) const;
  /// Piecewise 1-D only: exact mass of [a, b].
  double mass_between(double a, double b) const;
  /// Piecewise 1-D only: exact integral of x over [a, b] against the density.
  double first_moment_between(double a, double b) const;

 private:
  Measure() = default;

  MeasureForm form_ = MeasureForm::smooth;
  Box box_;
  std::string name_;
  double residual_ = 0.0;
  bool log_concave_ = true;
  PotentialPtr potential_;
  double log_z_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> densities_;
};

using MeasurePtr = std::shared_ptr<const Measure>;

MeasurePtr make_piecewise_1d(std::vector<double> breakpoints, std::vector<double> densities);
/// Sets logZ = ln sum_i w_i e^{-f(x_i)} so the grid mass is 1; the measure's
/// box is the grid's bounds.
MeasurePtr normalize(const PotentialPtr& p, const Grid& grid);

}  // namespace lcbl
