#pragma once

// Shared helpers for the unit and acceptance suites. The dense solver here is
// deliberately independent of the library's Eigen-based solve paths: plain
// Gaussian elimination with partial pivoting over std::vector storage.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cse/dataset.hpp"
#include "cse/rng.hpp"
#include "cse/survival.hpp"

namespace test_support {

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

/// Solve A X = B by Gaussian elimination with partial pivoting.
inline Matrix ge_solve(Matrix a, Matrix b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular test system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < m; ++c) b[r][c] -= f * b[col][c];
    }
  }
  Matrix x(n, std::vector<double>(m, 0.0));
  for (std::size_t ri = n; ri-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = b[ri][c];
      for (std::size_t k = ri + 1; k < n; ++k) acc -= a[ri][k] * x[k][c];
      x[ri][c] = acc / a[ri][ri];
    }
  }
  return x;
}

inline double gauss_kernel(double a, double b, double sigma2) {
  const double d = a - b;
  return std::exp(-d * d / (2.0 * sigma2));
}

inline double gauss_kernel(const std::vector<double>& a, const std::vector<double>& b,
                           double sigma2) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * sigma2));
}

/// Mean embedding grid values of an uncensored conditional-mean-embedding
/// solve, written directly from the closed form with the GE solver:
/// values = H' (K + n eps I)^{-1} Ktilde 1_m.
inline std::vector<double> uncensored_cme_oracle(
    const std::vector<std::vector<double>>& control_covs, const std::vector<double>& times,
    const std::vector<std::vector<double>>& treated_covs, double sigma2_cov, double sigma2_time,
    double eps, const std::vector<double>& grid) {
  const std::size_t n = times.size();
  const std::size_t m = treated_covs.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = gauss_kernel(control_covs[i], control_covs[j], sigma2_cov);
    a[i][i] += static_cast<double>(n) * eps;
  }
  Matrix rhs(n, std::vector<double>(1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      acc += gauss_kernel(control_covs[i], treated_covs[j], sigma2_cov);
    rhs[i][0] = acc / static_cast<double>(m);
  }
  const Matrix beta = ge_solve(a, rhs);
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t i = 0; i < n; ++i)
      values[g] += beta[i][0] * gauss_kernel(times[i], grid[g], sigma2_time);
  return values;
}

struct RandomInstance {
  cse::RightCensoredSample control;
  std::vector<std::vector<double>> treated_covariates;
  double sigma2_cov = 1.0;
  double sigma2_time = 1.0;
  std::vector<double> grid;
};

/// Small random censored instance: lognormal times, normal covariates in
/// p dims, at least one event, a handful of treated covariates and a short
/// grid over the observed range.
inline RandomInstance random_instance(cse::Rng& rng, std::size_t max_n = 50,
                                      bool force_uncensored = false) {
  RandomInstance inst;
  const std::size_t n = 2 + rng.next_u64() % (max_n - 1);
  const std::size_t m = 1 + rng.next_u64() % 10;
  const std::size_t p = 1 + rng.next_u64() % 3;
  inst.control.covariate_dim = p;
  double t_lo = 1e300, t_hi = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    cse::Observation obs;
    obs.time = std::exp(rng.normal());
    obs.event = force_uncensored || rng.uniform() < 0.6 ? 1 : 0;
    obs.arm = 0;
    for (std::size_t k = 0; k < p; ++k) obs.covariates.push_back(rng.normal());
    t_lo = std::min(t_lo, obs.time);
    t_hi = std::max(t_hi, obs.time);
    inst.control.observations.push_back(std::move(obs));
  }
  if (inst.control.event_count() == 0) inst.control.observations[0].event = 1;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> x;
    for (std::size_t k = 0; k < p; ++k) x.push_back(0.3 + rng.normal());
    inst.treated_covariates.push_back(std::move(x));
  }
  inst.sigma2_cov = 0.5 + rng.uniform();
  inst.sigma2_time = 0.5 + rng.uniform();
  const std::size_t grid_n = 8;
  inst.grid.resize(grid_n);
  const double span = t_hi > t_lo ? t_hi - t_lo : 1.0;
  for (std::size_t g = 0; g < grid_n; ++g)
    inst.grid[g] = t_lo + span * static_cast<double>(g) / static_cast<double>(grid_n - 1);
  return inst;
}

inline Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

}  // namespace test_support
