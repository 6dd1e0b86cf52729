#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "doctest.h"

// Small property-testing helpers: a seeded generator and a loop that reports
// the failing case index and seed so a case can be replayed.
namespace gen {

inline std::uint64_t base_seed() { return 0x5eed1234abcdULL; }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  Eigen::VectorXd vec(int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }

  Eigen::VectorXd unit(int n) {
    Eigen::VectorXd v = vec(n);
    while (v.norm() < 1e-6) v = vec(n);
    return v / v.norm();
  }

  Eigen::MatrixXd orthogonal(int n) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ();
  }

  /// SPD matrix with eigenvalues log-uniform in [lo, hi].
  Eigen::MatrixXd spd(int n, double lo, double hi) {
    const Eigen::MatrixXd q = orthogonal(n);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = log_uniform(lo, hi);
    return q * lam.asDiagonal() * q.transpose();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `prop` on `cases` generators; each case gets its own seed.
inline void for_all(const char* name, int cases, const std::function<void(Gen&)>& prop,
                    std::uint64_t seed = base_seed()) {
  for (int k = 0; k < cases; ++k) {
    const std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1);
    Gen g(s);
    std::ostringstream where;
    where << name << " case " << k << " seed " << s;
    const std::string label = where.str();
    INFO(label);
    prop(g);
  }
}

}  // namespace gen
