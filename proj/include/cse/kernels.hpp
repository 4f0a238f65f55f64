#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cse/errors.hpp"
#include "cse/rng.hpp"

namespace cse {

/// Gaussian kernel exp(-||a - b||^2 / (2 sigma2)).
struct GaussianKernel {
  double sigma2 = 1.0;

  explicit GaussianKernel(double s2 = 1.0) : sigma2(s2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      throw DataError("kernel bandwidth sigma2 must be positive and finite");
  }

  double from_sqdist(double d2) const { return std::exp(-d2 / (2.0 * sigma2)); }
  double operator()(double a, double b) const { return from_sqdist((a - b) * (a - b)); }
};

/// Kernel matrix plus content hashes of the generating point sets, so reports
/// can state what a cached Gram was built from.
struct GramMatrix {
  Eigen::MatrixXd entries;
  std::uint64_t row_points_hash = 0;
  std::uint64_t col_points_hash = 0;
};

namespace detail {

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t hash_points(const Eigen::MatrixXd& pts) {
  return fnv1a64(reinterpret_cast<const unsigned char*>(pts.data()),
                 static_cast<std::size_t>(pts.size()) * sizeof(double));
}

}  // namespace detail

inline Eigen::MatrixXd as_matrix(const std::vector<double>& points) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, 0) = points[static_cast<std::size_t>(i)];
  return m;
}

/// sigma2 = median{||y_i - y_j||^2 : i < j} / 2. Rows of points are the
/// vectors. The median of an even count is the mean of the two central order
/// statistics. Above max_points a seeded uniform subsample keeps the cost and
/// memory bounded.
inline double median_heuristic(const Eigen::MatrixXd& points, std::size_t max_points = 20000,
                               std::uint64_t subsample_seed = 0x5EEDBA5EULL) {
  Eigen::MatrixXd pts = points;
  if (static_cast<std::size_t>(pts.rows()) > max_points) {
    Rng rng(subsample_seed);
    std::vector<std::size_t> idx(static_cast<std::size_t>(pts.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < max_points; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(max_points), pts.cols());
    for (std::size_t i = 0; i < max_points; ++i)
      sub.row(static_cast<Eigen::Index>(i)) = pts.row(static_cast<Eigen::Index>(idx[i]));
    pts = std::move(sub);
  }
  const Eigen::Index n = pts.rows();
  if (n < 2) throw DataError("median heuristic needs at least 2 points");
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d2.push_back((pts.row(i) - pts.row(j)).squaredNorm());
  const std::size_t count = d2.size();
  const std::size_t mid = count / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double median = d2[mid];
  if (count % 2 == 0) {
    const double upper = median;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     d2.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (d2[mid - 1] + upper);
  }
  if (median == 0.0) throw AllPointsIdentical();
  return median / 2.0;
}

inline double median_heuristic(const std::vector<double>& points, std::size_t max_points = 20000,
                               std::uint64_t subsample_seed = 0x5EEDBA5EULL) {
  return median_heuristic(as_matrix(points), max_points, subsample_seed);
}

/// entries(i, j) = k(rows_i, cols_j). Row and column point sets must share the
/// dimension.
inline GramMatrix gram(const GaussianKernel& kernel, const Eigen::MatrixXd& rows,
                       const Eigen::MatrixXd& cols) {
  if (rows.rows() == 0 || cols.rows() == 0) throw EmptyInput("empty point set for Gram matrix");
  if (rows.cols() != cols.cols())
    throw DimensionMismatch(static_cast<std::size_t>(rows.cols()),
                            static_cast<std::size_t>(cols.cols()));
  GramMatrix g;
  g.entries.resize(rows.rows(), cols.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < cols.rows(); ++j)
      g.entries(i, j) = kernel.from_sqdist((rows.row(i) - cols.row(j)).squaredNorm());
  g.row_points_hash = detail::hash_points(rows);
  g.col_points_hash = detail::hash_points(cols);
  return g;
}

inline GramMatrix gram(const GaussianKernel& kernel, const std::vector<double>& rows,
                       const std::vector<double>& cols) {
  return gram(kernel, as_matrix(rows), as_matrix(cols));
}

/// n_points equally spaced values from min(sample_times) to max(sample_times).
inline std::vector<double> time_grid(const std::vector<double>& sample_times, int n_points) {
  if (sample_times.empty()) throw EmptyInput("no sample times for grid");
  if (n_points < 2) throw std::invalid_argument("time_grid needs n_points >= 2");
  const auto [lo_it, hi_it] = std::minmax_element(sample_times.begin(), sample_times.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) throw DegenerateRange();
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  const double step = (hi - lo) / static_cast<double>(n_points - 1);
  for (int k = 0; k < n_points; ++k) grid[static_cast<std::size_t>(k)] = lo + step * k;
  grid.back() = hi;
  return grid;
}

}  // namespace cse
