#include "lcbl/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/QR>

#include "lcbl/error.hpp"
#include "lcbl/parallel.hpp"

namespace lcbl {

namespace {

constexpr double kTiny = 1e-300;

std::mt19937_64 case_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double margin(const LemmaCheck& c) { return (c.rhs - c.lhs) / std::max(std::abs(c.rhs), kTiny); }

template <class Case>
SuiteResult run_suite(std::string name, std::size_t cases, std::uint64_t seed, Case&& one) {
  const std::vector<LemmaCheck> checks = [&] {
    std::vector<LemmaCheck> out(cases);
    parallel_chunks(cases, 256, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        auto rng = case_stream(seed, k);
        out[k] = one(rng);
      }
    });
    return out;
  }();
  SuiteResult s;
  s.name = std::move(name);
  s.cases = cases;
  s.seed = seed;
  s.worst_margin = cases ? margin(checks[0]) : 0.0;
  for (std::size_t k = 0; k < cases; ++k) {
    s.worst_margin = std::min(s.worst_margin, margin(checks[k]));
    if (!checks[k].holds) {
      ++s.failures;
      if (!s.first_failure) s.first_failure = k;
    }
  }
  return s;
}

}  // namespace

LemmaCheck check_matrix_power_lemma(const Mat& a, const Vec& v, double p) {
  if (a.rows() != a.cols() || a.rows() != v.size()) throw Error(ErrorKind::invalid_dimension, "matrix and vector sizes differ");
  if (relative_asymmetry(a) > 1e-10) throw Error(ErrorKind::invalid_input, "matrix is not symmetric");
  if (!(p >= 2.0)) throw Error(ErrorKind::domain_error, "the matrix power lemma needs p >= 2");
  const SymEig e = sym_eig(a);
  if (!(e.values.minCoeff() > 0.0)) throw Error(ErrorKind::invalid_input, "matrix is not positive definite");
  const Vec c = e.vectors.transpose() * v;
  double root = 0.0, half = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    root += std::pow(e.values[i], 2.0 / p) * c[i] * c[i];
    half += e.values[i] * c[i] * c[i];
  }
  LemmaCheck r;
  r.lhs = std::pow(root, p / 2.0);
  r.rhs = std::pow(v.squaredNorm(), (p - 2.0) / 2.0) * half;
  r.holds = r.lhs <= r.rhs + 1e-12 * r.rhs;
  return r;
}

LemmaCheck check_quotient_convexity(double a, double b, double alpha, double beta) {
  if (!(alpha > beta && beta > 0.0)) throw Error(ErrorKind::domain_error, "quotient convexity needs alpha > beta > 0");
  LemmaCheck r;
  r.lhs = a * a / alpha;
  r.rhs = b * b / beta + (a - b) * (a - b) / (alpha - beta);
  r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + r.rhs);
  return r;
}

Json to_json(const SuiteResult& s) {
  Json j;
  j["name"] = s.name;
  j["cases"] = s.cases;
  j["failures"] = s.failures;
  j["worst_margin"] = number(s.worst_margin);
  j["seed"] = s.seed;
  if (s.first_failure) j["first_failure"] = *s.first_failure;
  return j;
}

SuiteResult matrix_power_suite(std::size_t cases, std::uint64_t seed, int dimension) {
  return run_suite("matrix-power", cases, seed, [dimension](std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> log_eig(std::log(1e-3), std::log(1e3));
    std::uniform_real_distribution<double> power(2.0, 32.0);
    Mat g(dimension, dimension);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    Vec lam(dimension);
    for (int i = 0; i < dimension; ++i) lam[i] = std::exp(log_eig(rng));
    Mat a = q * lam.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose());
    Vec v(dimension);
    for (int i = 0; i < dimension; ++i) v[i] = normal(rng);
    return check_matrix_power_lemma(a, v, power(rng));
  });
}

SuiteResult quotient_convexity_suite(std::size_t cases, std::uint64_t seed) {
  return run_suite("quotient-convexity", cases, seed, [](std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> log_scale(std::log(1e-3), std::log(1e3));
    const double beta = std::exp(log_scale(rng));
    const double alpha = beta + std::exp(log_scale(rng));
    const double a = normal(rng) * std::exp(0.5 * log_scale(rng));
    const double b = normal(rng) * std::exp(0.5 * log_scale(rng));
    return check_quotient_convexity(a, b, alpha, beta);
  });
}

InequalityReport verify_inductive_step(const SplitMeasure& sm, const TestFunction& h_fn, double tol) {
  const Quadrature& q = *sm.q;
  if (q.dimension() != 2 || sm.m != 1) {
    throw Error(ErrorKind::invalid_dimension, "the inductive step is checked for m = 1 and one z-coordinate");
  }
  if (!q.measure->is_smooth()) throw Error(ErrorKind::unsupported_form, "the inductive step needs a smooth measure");
  const Potential& pot = q.measure->potential();
  const Field h = sample(h_fn, q.grid);
  const VectorField dh = sample_gradient(h_fn, q.grid);
  const std::size_t ny = sm.ny;

  std::vector<double> b_side(ny), goal_side(ny);
  std::vector<double> ind_h_lhs(ny), ind_h_rhs(ny), ind_f_lhs(ny), ind_f_rhs(ny);
  std::vector<double> det_lhs(ny), det_rhs(ny);
  std::vector<double> quot_lhs(ny), quot_rhs(ny);
  std::vector<double> psd(ny);
  std::vector<char> flagged(ny, 0);

  parallel_chunks(ny, 8, [&](std::size_t begin, std::size_t end) {
    std::vector<double> fy(sm.nz), fyy(sm.nz), fyz(sm.nz), fzz(sm.nz);
    for (std::size_t k = begin; k < end; ++k) {
      double mh = 0.0, mfy = 0.0;
      for (std::size_t j = 0; j < sm.nz; ++j) {
        const std::size_t i = sm.node(k, j);
        const Vec x = q.grid->point(i);
        const Vec g = pot.gradient(x);
        const Mat hs = pot.hessian(x);
        fy[j] = g[0];
        fyy[j] = hs(0, 0);
        fyz[j] = hs(0, 1);
        fzz[j] = hs(1, 1);
        mh += sm.weight(k, j) * h.values[i];
        mfy += sm.weight(k, j) * fy[j];
      }
      double var_h = 0.0, cov = 0.0, var_f = 0.0, hy = 0.0, mfyy = 0.0;
      double a11 = 0.0, a12 = 0.0, a22 = 0.0, goal_num = 0.0, goal_den = 0.0;
      for (std::size_t j = 0; j < sm.nz; ++j) {
        const std::size_t i = sm.node(k, j);
        const double w = sm.weight(k, j);
        const double dhv = h.values[i] - mh;
        const double dfv = fy[j] - mfy;
        const double h_y = dh.at(i)[0];
        const double h_z = dh.at(i)[1];
        var_h += w * dhv * dhv;
        cov += w * dhv * dfv;
        var_f += w * dfv * dfv;
        hy += w * h_y;
        mfyy += w * fyy[j];
        a11 += w * h_z * h_z / fzz[j];
        a12 += w * h_z * fyz[j] / fzz[j];
        a22 += w * fyz[j] * fyz[j] / fzz[j];
        goal_num += w * (h_y - h_z * fyz[j] / fzz[j]);
        goal_den += w * (fyy[j] - fyz[j] * fyz[j] / fzz[j]);
      }
      const double alpha = mfyy - var_f;
      const double a = hy - cov;
      if (!(alpha > 0.0) || !(goal_den > 0.0)) flagged[k] = 1;
      b_side[k] = var_h + (alpha > 0.0 ? a * a / alpha : 0.0);
      goal_side[k] = a11 + (goal_den > 0.0 ? goal_num * goal_num / goal_den : 0.0);
      ind_h_lhs[k] = var_h;
      ind_h_rhs[k] = a11;
      ind_f_lhs[k] = var_f;
      ind_f_rhs[k] = a22;
      const double d11 = a11 - var_h;
      const double d12 = a12 - cov;
      const double d22 = a22 - var_f;
      det_lhs[k] = d12 * d12;
      det_rhs[k] = d11 * d22;
      const double mean = 0.5 * (d11 + d22);
      const double spread = std::sqrt(0.25 * (d11 - d22) * (d11 - d22) + d12 * d12);
      psd[k] = mean - spread;
      // The last step: quotient convexity with b, beta from the 2x2 difference.
      const double b = a12 - cov;
      const double beta = a22 - var_f;
      if (alpha > beta && beta > 0.0) {
        quot_lhs[k] = a * a / alpha;
        quot_rhs[k] = b * b / beta + (a - b) * (a - b) / (alpha - beta);
      } else {
        quot_lhs[k] = 0.0;
        quot_rhs[k] = 0.0;
      }
    }
  });

  const std::string label = "h = " + h_fn.name + " on " + q.measure->name();
  InequalityReport r = worst_case("goal", label, 2, b_side, goal_side, tol);
  r.sub_reports.push_back(worst_case("ind-h", label, 2, ind_h_lhs, ind_h_rhs, tol));
  r.sub_reports.push_back(worst_case("ind-fy", label, 2, ind_f_lhs, ind_f_rhs, tol));
  r.sub_reports.push_back(worst_case("ind2", label, 2, det_lhs, det_rhs, tol));
  r.sub_reports.push_back(worst_case("quotient", label, 2, quot_lhs, quot_rhs, tol));
  const double psd_margin = *std::min_element(psd.begin(), psd.end());
  std::size_t flags = 0;
  for (char f : flagged) flags += f ? 1 : 0;
  r.meta["psd_margin"] = number(psd_margin);
  r.meta["psd_holds"] = psd_margin >= kPsdMargin;
  r.meta["flagged_y_nodes"] = flags;
  if (psd_margin < kPsdMargin || flags > 0) r.verdict = Verdict::violated;
  return r;
}

}  // namespace lcbl
