#include "lcbl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lcbl/error.hpp"

namespace lcbl {

std::string_view to_string(PotentialKind kind) noexcept {
  switch (kind) {
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::radial: return "radial";
    case PotentialKind::quadratic_form: return "quadratic-form";
    case PotentialKind::custom: return "custom";
    case PotentialKind::regularized: return "regularized";
  }
  return "unknown";
}

namespace {

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

// sinh(r)/r and (r cosh r - sinh r)/r^3 with series near 0.
double sinhc(double r) {
  if (std::abs(r) < 1e-3) return 1.0 + r * r / 6.0 + r * r * r * r / 120.0;
  return std::sinh(r) / r;
}

double cosh_radial_curvature(double r) {
  if (std::abs(r) < 1e-2) {
    const double r2 = r * r;
    return 1.0 / 3.0 + r2 / 30.0 + r2 * r2 / 840.0 + r2 * r2 * r2 / 45360.0;
  }
  return (r * std::cosh(r) - std::sinh(r)) / (r * r * r);
}

Vec fd_gradient_of(const Potential::ValueFn& value, const Vec& x) {
  Vec g(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    const double h = 1e-6 * (1.0 + std::abs(x[a]));
    Vec xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (value(xp) - value(xm)) / (2.0 * h);
  }
  return g;
}

Mat fd_hessian_of(const Potential::GradientFn& gradient, const Vec& x) {
  const Eigen::Index n = x.size();
  Mat h(n, n);
  const double step = 1e-5 * (1.0 + x.norm());
  for (Eigen::Index a = 0; a < n; ++a) {
    Vec xp = x, xm = x;
    xp[a] += step;
    xm[a] -= step;
    h.col(a) = (gradient(xp) - gradient(xm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

RadialProfile radial_profile(const std::string& name) {
  if (name == "s/2") {
    return {name, [](double s) { return 0.5 * s; }, [](double) { return 0.5; },
            [](double) { return 0.0; }};
  }
  if (name == "s^2") {
    return {name, [](double s) { return s * s; }, [](double s) { return 2.0 * s; },
            [](double) { return 2.0; }};
  }
  if (name == "s^2+s") {
    return {name, [](double s) { return s * s + s; }, [](double s) { return 2.0 * s + 1.0; },
            [](double) { return 2.0; }};
  }
  if (name == "cosh-radial") {
    return {name, [](double s) { return std::cosh(std::sqrt(s)); },
            [](double s) { return 0.5 * sinhc(std::sqrt(s)); },
            [](double s) { return 0.25 * cosh_radial_curvature(std::sqrt(s)); }};
  }
  throw Error(ErrorKind::invalid_input, "unknown radial profile '" + name +
                                            "' (expected s/2, s^2, s^2+s, cosh-radial)");
}

RadialProfile polynomial_profile(double a, double b) {
  std::ostringstream os;
  os << a << "*s+" << b << "*s^2";
  return {os.str(), [a, b](double s) { return a * s + b * s * s; },
          [a, b](double s) { return a + 2.0 * b * s; }, [b](double) { return 2.0 * b; }};
}

Potential::Potential(int dimension, PotentialKind kind, std::string name, ValueFn value,
                     GradientFn gradient, HessianFn hessian, bool fd_hessian)
    : n_(dimension),
      kind_(kind),
      name_(std::move(name)),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      fd_hessian_(fd_hessian) {
  if (n_ < 1) throw Error(ErrorKind::invalid_dimension, "potential dimension must be >= 1");
}

Potential Potential::with_precision(Mat precision) const {
  Potential p = *this;
  p.precision_ = std::move(precision);
  return p;
}

Potential Potential::with_radial(RadialProfile profile) const {
  Potential p = *this;
  p.radial_ = std::move(profile);
  return p;
}

PotentialPtr make_gaussian(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "gaussian dimension must be >= 1");
  const double c = 0.5 * n * std::log(2.0 * std::numbers::pi);
  Potential p(
      n, PotentialKind::gaussian, "gaussian(" + std::to_string(n) + ")",
      [c](const Vec& x) { return 0.5 * x.squaredNorm() + c; }, [](const Vec& x) { return x; },
      [n](const Vec&) { return Mat::Identity(n, n); });
  return std::make_shared<const Potential>(p.with_precision(Mat::Identity(n, n)));
}

PotentialPtr make_radial(RadialProfile profile, int n) {
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "radial dimension must be >= 1");
  auto phi = profile.phi;
  auto dphi = profile.dphi;
  auto ddphi = profile.ddphi;
  Potential p(
      n, PotentialKind::radial, "radial[" + profile.name + "](" + std::to_string(n) + ")",
      [phi](const Vec& x) { return phi(x.squaredNorm()); },
      [dphi](const Vec& x) { return Vec(2.0 * dphi(x.squaredNorm()) * x); },
      [dphi, ddphi, n](const Vec& x) {
        const double s = x.squaredNorm();
        const double d1 = dphi(s);
        if (!(d1 > 0.0)) {
          throw Error(ErrorKind::convexity_violation,
                      "radial profile has phi'(|x|^2) <= 0 at x = " + format_point(x));
        }
        Mat h = 2.0 * d1 * Mat::Identity(n, n);
        h.noalias() += 4.0 * ddphi(s) * x * x.transpose();
        return h;
      });
  return std::make_shared<const Potential>(p.with_radial(std::move(profile)));
}

PotentialPtr make_quadratic(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 1 || a.cols() != a.rows()) {
    throw Error(ErrorKind::invalid_dimension, "quadratic form needs a square matrix");
  }
  if (relative_asymmetry(a) > 1e-12) throw Error(ErrorKind::invalid_input, "quadratic form matrix is not symmetric");
  const SymEig eig = sym_eig(a);
  if (eig.values[0] <= kMinEigenvalue) {
    throw Error(ErrorKind::convexity_violation, "quadratic form matrix is not positive definite");
  }
  const double c = 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * eig.values.array().log().sum();
  Mat sym = 0.5 * (a + a.transpose());
  Potential p(
      n, PotentialKind::quadratic_form, "quadratic(" + std::to_string(n) + ")",
      [sym, c](const Vec& x) { return 0.5 * x.dot(sym * x) + c; },
      [sym](const Vec& x) { return Vec(sym * x); }, [sym](const Vec&) { return sym; });
  return std::make_shared<const Potential>(p.with_precision(sym));
}

PotentialPtr make_cosh(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "cosh dimension must be >= 1");
  return std::make_shared<const Potential>(
      n, PotentialKind::custom, "cosh(" + std::to_string(n) + ")",
      [](const Vec& x) { return x.array().cosh().sum(); },
      [](const Vec& x) { return Vec(x.array().sinh()); },
      [](const Vec& x) { return Mat(x.array().cosh().matrix().asDiagonal()); });
}

PotentialPtr make_custom(int n, std::string name, Potential::ValueFn value,
                         Potential::GradientFn gradient, Potential::HessianFn hessian) {
  if (n < 1) throw Error(ErrorKind::invalid_dimension, "custom potential dimension must be >= 1");
  if (!value) throw Error(ErrorKind::invalid_input, "custom potential needs a value evaluator");
  if (!gradient) gradient = [value](const Vec& x) { return fd_gradient_of(value, x); };
  const bool fd = !hessian;
  if (fd) hessian = [gradient](const Vec& x) { return fd_hessian_of(gradient, x); };
  return std::make_shared<const Potential>(n, PotentialKind::custom, std::move(name),
                                           std::move(value), std::move(gradient),
                                           std::move(hessian), fd);
}

PotentialPtr regularize(const PotentialPtr& p, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::invalid_input, "regularization eps must be > 0");
  const int n = p->dimension();
  PotentialPtr base = p;
  std::ostringstream name;
  name << p->name() << "+" << eps << "|x|^2";
  Potential r(
      n, PotentialKind::regularized, name.str(),
      [base, eps](const Vec& x) { return base->value(x) + eps * x.squaredNorm(); },
      [base, eps](const Vec& x) { return Vec(base->gradient(x) + 2.0 * eps * x); },
      [base, eps, n](const Vec& x) { return Mat(base->hessian(x) + 2.0 * eps * Mat::Identity(n, n)); },
      p->fd_hessian());
  if (p->gaussian_precision()) {
    r = r.with_precision(*p->gaussian_precision() + 2.0 * eps * Mat::Identity(n, n));
  }
  return std::make_shared<const Potential>(std::move(r));
}

HessianSpectrum hessian_spectrum_at(const Potential& p, const Vec& x) {
  const Mat h = p.hessian(x);
  const SymEig eig = sym_eig(h);
  if (!(eig.values[0] > kMinEigenvalue)) {
    throw Error(ErrorKind::convexity_violation,
                "Hessian least eigenvalue " + std::to_string(eig.values[0]) + " <= 1e-12 at x = " +
                    format_point(x));
  }
  return {eig.values[0], eig.values[eig.values.size() - 1], eig.values, eig.vectors};
}

Measure Measure::smooth(PotentialPtr potential, double log_z, Box box, double residual) {
  if (!potential) throw Error(ErrorKind::invalid_input, "smooth measure needs a potential");
  if (box.dimension() != potential->dimension()) {
    throw Error(ErrorKind::invalid_dimension, "measure box dimension differs from the potential's");
  }
  Measure m;
  m.form_ = MeasureForm::smooth;
  m.name_ = potential->name();
  m.potential_ = std::move(potential);
  m.log_z_ = log_z;
  m.box_ = std::move(box);
  m.residual_ = residual;
  return m;
}

Measure Measure::piecewise(std::vector<double> breakpoints, std::vector<double> densities) {
  if (breakpoints.size() < 2 || densities.size() + 1 != breakpoints.size()) {
    throw Error(ErrorKind::invalid_input, "piecewise measure needs K+1 breakpoints for K densities");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw Error(ErrorKind::invalid_input, "piecewise breakpoints must be strictly ascending");
    }
  }
  double mass = 0.0;
  for (std::size_t k = 0; k < densities.size(); ++k) {
    if (!(densities[k] >= 0.0) || !std::isfinite(densities[k])) {
      throw Error(ErrorKind::invalid_input, "piecewise densities must be finite and nonnegative");
    }
    mass += densities[k] * (breakpoints[k + 1] - breakpoints[k]);
  }
  if (!(mass > 0.0)) throw Error(ErrorKind::invalid_input, "piecewise densities are all zero");
  for (double& d : densities) d /= mass;

  Measure m;
  m.form_ = MeasureForm::piecewise1d;
  m.box_ = Box{{breakpoints.front()}, {breakpoints.back()}};
  // A step density is log-concave only when it is uniform on one interval.
  bool ok = true;
  {
    std::size_t first = densities.size(), last = 0;
    for (std::size_t k = 0; k < densities.size(); ++k) {
      if (densities[k] > 0.0) {
        first = std::min(first, k);
        last = k;
      }
    }
    for (std::size_t k = first; k <= last; ++k) {
      if (std::abs(densities[k] - densities[first]) > 1e-12 * densities[first]) ok = false;
    }
  }
  m.log_concave_ = ok;
  std::ostringstream name;
  name << "piecewise1d[" << densities.size() << " cells]";
  m.name_ = name.str();
  m.breakpoints_ = std::move(breakpoints);
  m.densities_ = std::move(densities);
  return m;
}

const Potential& Measure::potential() const {
  if (!potential_) {
    throw Error(ErrorKind::unsupported_form, "operation needs a smooth-potential measure, got " + name_);
  }
  return *potential_;
}

double Measure::density(const Vec& x) const {
  if (form_ == MeasureForm::smooth) return std::exp(-potential_->value(x) - log_z_);
  const double t = x[0];
  if (t < breakpoints_.front() || t > breakpoints_.back()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin());
  k = std::clamp<std::size_t>(k, 1, densities_.size()) - 1;
  return densities_[k];
}

double Measure::mass_between(double a, double b) const {
  if (form_ != MeasureForm::piecewise1d) {
    throw Error(ErrorKind::unsupported_form, "exact interval mass needs a piecewise measure");
  }
  if (b < a) std::swap(a, b);
  double mass = 0.0;
  for (std::size_t k = 0; k < densities_.size(); ++k) {
    const double lo = std::max(a, breakpoints_[k]);
    const double hi = std::min(b, breakpoints_[k + 1]);
    if (hi > lo) mass += densities_[k] * (hi - lo);
  }
  return mass;
}

double Measure::first_moment_between(double a, double b) const {
  if (form_ != MeasureForm::piecewise1d) {
    throw Error(ErrorKind::unsupported_form, "exact interval moment needs a piecewise measure");
  }
  if (b < a) std::swap(a, b);
  double moment = 0.0;
  for (std::size_t k = 0; k < densities_.size(); ++k) {
    const double lo = std::max(a, breakpoints_[k]);
    const double hi = std::min(b, breakpoints_[k + 1]);
    if (hi > lo) moment += densities_[k] * 0.5 * (hi * hi - lo * lo);
  }
  return moment;
}

MeasurePtr make_piecewise_1d(std::vector<double> breakpoints, std::vector<double> densities) {
  return std::make_shared<const Measure>(
      Measure::piecewise(std::move(breakpoints), std::move(densities)));
}

namespace {

double log_mass(const Potential& p, const Grid& grid, std::size_t stride_skip) {
  // log sum w_i e^{-f_i} via a running max for stability. stride_skip > 1
  // restricts to the nested coarse subgrid (every other node per axis).
  const int n = grid.dimension();
  std::vector<double> terms;
  terms.reserve(grid.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double w = 1.0;
    bool keep = true;
    for (int a = 0; a < n && keep; ++a) {
      const std::size_t k = grid.index_along(i, a);
      if (stride_skip == 1) {
        w *= grid.axis(a).weights[k];
      } else if (k % stride_skip != 0) {
        keep = false;
      } else {
        const Axis& ax = grid.axis(a);
        const double h = 2.0 * ax.spacing;
        w *= (k == 0 || k + 1 == ax.size()) ? 0.5 * h : h;
      }
    }
    if (!keep) continue;
    const double t = std::log(w) - p.value(grid.point(i));
    if (!std::isfinite(t) && t != -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorKind::quadrature_failure, "non-finite potential value at node " + std::to_string(i));
    }
    terms.push_back(t);
    top = std::max(top, t);
  }
  if (!std::isfinite(top)) throw Error(ErrorKind::quadrature_failure, "grid mass is zero or non-finite");
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

}  // namespace

MeasurePtr normalize(const PotentialPtr& p, const Grid& grid) {
  if (grid.dimension() != p->dimension()) {
    throw Error(ErrorKind::invalid_dimension, "grid dimension differs from the potential's");
  }
  const double log_z = log_mass(*p, grid, 1);
  if (!std::isfinite(log_z)) throw Error(ErrorKind::quadrature_failure, "normalization mass is not finite");
  double residual = 0.0;
  bool nested = grid.uniform();
  for (int a = 0; a < grid.dimension(); ++a) nested = nested && (grid.axis(a).size() % 2 == 1);
  if (nested) residual = std::abs(std::expm1(log_mass(*p, grid, 2) - log_z));
  return std::make_shared<const Measure>(Measure::smooth(p, log_z, grid.bounds(), residual));
}

}  // namespace lcbl
