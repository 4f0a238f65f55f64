#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cse/errors.hpp"
#include "cse/kernels.hpp"
#include "cse/survival.hpp"

namespace cse {

/// Regularizer for the weighted kernel ridge solve. The n_power rule resolves
/// eps_n = c * n^(-q); q < 1/2 keeps sqrt(n) * eps_n -> infinity.
struct RidgeSolveConfig {
  enum class Rule { fixed, n_power };
  enum class Path { general, symmetrized };

  Rule rule = Rule::n_power;
  double epsilon = 1e-2;         // used when rule == fixed
  double constant = 0.1;         // c in c * n^(-q)
  double exponent = 1.0 / 3.0;   // q in (0, 1/2)
  Path path = Path::general;

  static RidgeSolveConfig fixed_epsilon(double eps, Path p = Path::general) {
    RidgeSolveConfig cfg;
    cfg.rule = Rule::fixed;
    cfg.epsilon = eps;
    cfg.path = p;
    return cfg;
  }

  double resolve(std::size_t n) const {
    double eps = 0.0;
    if (rule == Rule::fixed) {
      eps = epsilon;
    } else {
      if (!(constant > 0.0)) throw DataError("epsilon rule constant must be positive");
      if (!(exponent > 0.0) || !(exponent < 0.5))
        throw DataError("epsilon rule exponent must lie in (0, 1/2)");
      eps = constant * std::pow(static_cast<double>(n), -exponent);
    }
    if (!(eps > 0.0) || !std::isfinite(eps))
      throw DataError("resolved epsilon must be positive and finite");
    return eps;
  }
};

/// An RKHS element mu(.) = sum_i coefficients[i] * l(expansion_times[i], .)
/// together with its evaluation on a time grid.
struct EmbeddingCurve {
  std::vector<double> expansion_times;
  std::vector<double> coefficients;
  std::vector<double> grid;
  std::vector<double> grid_values;
  GaussianKernel time_kernel{1.0};
  std::string label;
};

/// mu(t) = sum_i coeff_i * l(s_i, t); agrees with the stored grid values at
/// grid points.
inline double depth_evaluate(const EmbeddingCurve& curve, double t) {
  double v = 0.0;
  for (std::size_t i = 0; i < curve.expansion_times.size(); ++i)
    v += curve.coefficients[i] * curve.time_kernel(curve.expansion_times[i], t);
  return v;
}

/// sqrt(a' L a) with L the self-Gram of the support points; round-off below
/// zero is clamped before the square root.
inline double rkhs_norm(const std::vector<double>& support, const std::vector<double>& coeff,
                        const GaussianKernel& kernel) {
  if (support.size() != coeff.size()) throw LengthMismatch(support.size(), coeff.size());
  if (support.empty()) throw EmptyInput("empty expansion");
  double q = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = 0; j < support.size(); ++j)
      q += coeff[i] * coeff[j] * kernel(support[i], support[j]);
  return std::sqrt(std::max(0.0, q));
}

inline double rkhs_norm(const EmbeddingCurve& curve) {
  return rkhs_norm(curve.expansion_times, curve.coefficients, curve.time_kernel);
}

/// Solution operator of the weighted ridge system (WK + n eps I) C = W H.
/// Exposes M = (WK + n eps I)^{-1} W as a map so cross-kernel columns can be
/// applied later without materializing H. The general path factors the
/// non-symmetric system with partial-pivot LU; the symmetrized path solves
/// (W^{1/2} K W^{1/2} + n eps I) y = W^{1/2} rhs and maps back, exploiting
/// that M = W^{1/2} (W^{1/2} K W^{1/2} + n eps I)^{-1} W^{1/2} is symmetric.
class ConditionalFit {
 public:
  static ConditionalFit fit(const WeightedArm& weighted, const GaussianKernel& covariate_kernel,
                            const RidgeSolveConfig& config) {
    const std::size_t n = weighted.size();
    if (n == 0) throw EmptyInput("empty arm");
    if (std::none_of(weighted.weights.begin(), weighted.weights.end(),
                     [](double w) { return w > 0.0; }))
      throw DegenerateCensoring();

    ConditionalFit f;
    f.epsilon_ = config.resolve(n);
    f.path_ = config.path;
    f.weights_ = Eigen::Map<const Eigen::VectorXd>(weighted.weights.data(),
                                                   static_cast<Eigen::Index>(n));
    Eigen::MatrixXd covariates(static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(weighted.arm_data.covariate_dim));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < weighted.arm_data.covariate_dim; ++k)
        covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            weighted.arm_data.observations[i].covariates[k];
    f.kernel_ = gram(covariate_kernel, covariates, covariates).entries;
    const double shift = static_cast<double>(n) * f.epsilon_;

    f.system_ = f.weights_.asDiagonal() * f.kernel_;
    f.system_.diagonal().array() += shift;
    if (f.path_ == RidgeSolveConfig::Path::general) {
      f.lu_.compute(f.system_);
    } else {
      f.sqrt_weights_ = f.weights_.cwiseSqrt();
      Eigen::MatrixXd sym = f.sqrt_weights_.asDiagonal() * f.kernel_ *
                            f.sqrt_weights_.asDiagonal();
      sym.diagonal().array() += shift;
      f.sym_system_ = sym;
      f.ldlt_.compute(sym);
    }
    return f;
  }

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double epsilon() const { return epsilon_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& system_matrix() const { return system_; }
  const Eigen::MatrixXd& kernel_matrix() const { return kernel_; }

  /// C = M * rhs_sections, i.e. the solution of (WK + n eps I) C = W * rhs.
  /// Columns of rhs are kernel sections evaluated however the caller likes
  /// (probe H matrices, grid sections, ...).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd c;
    if (path_ == RidgeSolveConfig::Path::general) {
      c = lu_.solve(Eigen::MatrixXd(weights_.asDiagonal() * rhs));
    } else {
      c = sqrt_weights_.asDiagonal() *
          ldlt_.solve(Eigen::MatrixXd(sqrt_weights_.asDiagonal() * rhs));
    }
    const double scale = 1.0 + (weights_.asDiagonal() * rhs).cwiseAbs().maxCoeff();
    const double r = residual(c, rhs);
    if (!std::isfinite(r) || r > kResidualTol * scale) throw SingularSystem(r);
    return c;
  }

  /// M' v = W (KW + n eps I)^{-1} v; the embedding-coefficient map.
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const {
    Eigen::VectorXd c;
    double r = 0.0, scale = 1.0;
    if (path_ == RidgeSolveConfig::Path::general) {
      const Eigen::VectorXd y = lu_.transpose().solve(v);
      c = weights_.asDiagonal() * y;
      r = (system_.transpose() * y - v).cwiseAbs().maxCoeff();
      scale += v.cwiseAbs().maxCoeff();
    } else {
      const Eigen::VectorXd sv = sqrt_weights_.asDiagonal() * v;
      const Eigen::VectorXd z = ldlt_.solve(sv);
      c = sqrt_weights_.asDiagonal() * z;
      r = (sym_system_ * z - sv).cwiseAbs().maxCoeff();
      scale += sv.cwiseAbs().maxCoeff();
    }
    if (!std::isfinite(r) || r > kResidualTol * scale) throw SingularSystem(r);
    return c;
  }

  /// The dense n x n matrix M = (WK + n eps I)^{-1} W.
  Eigen::MatrixXd solution_matrix() const {
    return apply(Eigen::MatrixXd::Identity(system_.rows(), system_.cols()));
  }

  /// max-norm residual ||(WK + n eps I) C - W rhs||_max of a computed solve.
  double residual(const Eigen::MatrixXd& coefficients, const Eigen::MatrixXd& rhs) const {
    return (system_ * coefficients - weights_.asDiagonal() * rhs).cwiseAbs().maxCoeff();
  }

  /// RKHS norm of the fitted vector-valued ridge solution F evaluated against
  /// sections at the arm's times: ||F||^2 = sum_ij K_ij <c_i, c_j> with
  /// c = M h. Non-increasing in eps along a regularization ladder.
  double solution_norm(const GramMatrix& time_self_gram) const {
    const Eigen::MatrixXd B = solution_matrix();
    const double q =
        (kernel_.array() * (B * time_self_gram.entries * B.transpose()).array()).sum();
    return std::sqrt(std::max(0.0, q));
  }

 private:
  static constexpr double kResidualTol = 1e-8;

  Eigen::MatrixXd kernel_;
  Eigen::MatrixXd system_;
  Eigen::MatrixXd sym_system_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd sqrt_weights_;
  double epsilon_ = 0.0;
  RidgeSolveConfig::Path path_ = RidgeSolveConfig::Path::general;
};

namespace detail {

inline Eigen::MatrixXd covariate_matrix(const RightCensoredSample& sample) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(sample.size()),
                    static_cast<Eigen::Index>(sample.covariate_dim));
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t k = 0; k < sample.covariate_dim; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          sample.observations[i].covariates[k];
  return m;
}

inline std::vector<double> grid_values_from(const std::vector<double>& support,
                                            const Eigen::VectorXd& coeff,
                                            const GaussianKernel& time_kernel,
                                            const std::vector<double>& grid) {
  const Eigen::MatrixXd H = gram(time_kernel, support, grid).entries;  // n x N
  const Eigen::VectorXd v = H.transpose() * coeff;
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

/// Counterfactual mean embedding: the conditional fit on the (control) arm
/// averaged over the other arm's covariates. Coefficients are M' Ktilde 1_m,
/// zero at censored support points.
inline EmbeddingCurve counterfactual_embedding(const WeightedArm& control,
                                               const Eigen::MatrixXd& treated_covariates,
                                               const GaussianKernel& covariate_kernel,
                                               const GaussianKernel& time_kernel,
                                               const RidgeSolveConfig& config,
                                               const std::vector<double>& grid,
                                               std::string label = "mu<0|1>") {
  if (treated_covariates.rows() == 0) throw EmptyInput("no covariates to average over");
  if (static_cast<std::size_t>(treated_covariates.cols()) != control.arm_data.covariate_dim)
    throw DimensionMismatch(static_cast<std::size_t>(treated_covariates.cols()),
                            control.arm_data.covariate_dim);
  const ConditionalFit fit = ConditionalFit::fit(control, covariate_kernel, config);
  const Eigen::MatrixXd cross =
      gram(covariate_kernel, detail::covariate_matrix(control.arm_data), treated_covariates)
          .entries;
  const Eigen::VectorXd mean_section =
      cross * Eigen::VectorXd::Constant(cross.cols(), 1.0 / static_cast<double>(cross.cols()));
  const Eigen::VectorXd coeff = fit.apply_transpose(mean_section);

  EmbeddingCurve curve;
  curve.expansion_times = control.arm_data.times();
  curve.coefficients.assign(coeff.data(), coeff.data() + coeff.size());
  curve.grid = grid;
  curve.grid_values = detail::grid_values_from(curve.expansion_times, coeff, time_kernel, grid);
  curve.time_kernel = time_kernel;
  curve.label = std::move(label);
  return curve;
}

/// The arm's own censoring-corrected mean embedding:
/// mu(.) = (1/n) sum_i W_i l(T*_i, .).
inline EmbeddingCurve observational_embedding(const WeightedArm& arm,
                                              const GaussianKernel& time_kernel,
                                              const std::vector<double>& grid,
                                              std::string label = "mu<j|j>") {
  const std::size_t n = arm.size();
  if (n == 0) throw EmptyInput("empty arm");
  if (std::none_of(arm.weights.begin(), arm.weights.end(), [](double w) { return w > 0.0; }))
    throw DegenerateCensoring();
  Eigen::VectorXd coeff(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    coeff(static_cast<Eigen::Index>(i)) = arm.weights[i] / static_cast<double>(n);

  EmbeddingCurve curve;
  curve.expansion_times = arm.arm_data.times();
  curve.coefficients.assign(coeff.data(), coeff.data() + coeff.size());
  curve.grid = grid;
  curve.grid_values = detail::grid_values_from(curve.expansion_times, coeff, time_kernel, grid);
  curve.time_kernel = time_kernel;
  curve.label = std::move(label);
  return curve;
}

/// Conditional-averaging alternative for the own-arm embedding: the arm's
/// conditional fit averaged over its own covariates.
inline EmbeddingCurve observational_embedding_conditional(const WeightedArm& arm,
                                                          const GaussianKernel& covariate_kernel,
                                                          const GaussianKernel& time_kernel,
                                                          const RidgeSolveConfig& config,
                                                          const std::vector<double>& grid,
                                                          std::string label = "mu<j|j>") {
  return counterfactual_embedding(arm, detail::covariate_matrix(arm.arm_data), covariate_kernel,
                                  time_kernel, config, grid, std::move(label));
}

/// Evaluate the estimator through both closed forms and return the largest
/// absolute disagreement over the grid. The identity W (KW + n eps I)^{-1} =
/// (WK + n eps I)^{-1} W makes the exact values coincide; the two routes
/// factor different matrices.
inline double dual_form_check(const WeightedArm& control,
                              const Eigen::MatrixXd& treated_covariates,
                              const GaussianKernel& covariate_kernel,
                              const GaussianKernel& time_kernel, const RidgeSolveConfig& config,
                              const std::vector<double>& grid) {
  const EmbeddingCurve direct = counterfactual_embedding(
      control, treated_covariates, covariate_kernel, time_kernel, config, grid);

  const ConditionalFit fit = ConditionalFit::fit(control, covariate_kernel, config);
  const Eigen::MatrixXd H = gram(time_kernel, control.arm_data.times(), grid).entries;
  const Eigen::MatrixXd C = fit.apply(H);  // (WK + n eps I)^{-1} W H, n x N
  const Eigen::MatrixXd cross =
      gram(covariate_kernel, detail::covariate_matrix(control.arm_data), treated_covariates)
          .entries;
  const Eigen::VectorXd mean_section =
      cross * Eigen::VectorXd::Constant(cross.cols(), 1.0 / static_cast<double>(cross.cols()));
  const Eigen::VectorXd row_form = C.transpose() * mean_section;

  double worst = 0.0;
  for (Eigen::Index j = 0; j < row_form.size(); ++j)
    worst = std::max(worst,
                     std::abs(row_form(j) - direct.grid_values[static_cast<std::size_t>(j)]));
  return worst;
}

namespace detail {

inline EmbeddingCurve combine(const EmbeddingCurve& a, const EmbeddingCurve& b, double sign,
                              std::string label) {
  if (a.grid != b.grid) throw DataError("curves must share the evaluation grid");
  if (a.time_kernel.sigma2 != b.time_kernel.sigma2)
    throw DataError("curves must share the time kernel");
  EmbeddingCurve out;
  out.expansion_times = a.expansion_times;
  out.expansion_times.insert(out.expansion_times.end(), b.expansion_times.begin(),
                             b.expansion_times.end());
  out.coefficients = a.coefficients;
  for (double c : b.coefficients) out.coefficients.push_back(sign * c);
  out.grid = a.grid;
  out.grid_values.resize(a.grid_values.size());
  for (std::size_t k = 0; k < a.grid_values.size(); ++k)
    out.grid_values[k] = a.grid_values[k] + sign * b.grid_values[k];
  out.time_kernel = a.time_kernel;
  out.label = std::move(label);
  return out;
}

}  // namespace detail

inline EmbeddingCurve curve_difference(const EmbeddingCurve& a, const EmbeddingCurve& b,
                                       std::string label) {
  return detail::combine(a, b, -1.0, std::move(label));
}

inline EmbeddingCurve curve_sum(const EmbeddingCurve& a, const EmbeddingCurve& b,
                                std::string label) {
  return detail::combine(a, b, 1.0, std::move(label));
}

/// The treatment-arm survival gap split on the embedding scale:
/// term_a = mu<0|0> - mu<0|1> (covariate-composition effect),
/// term_b = mu<0|1> - mu<1|1> (distributional effect on the treated),
/// total  = term_a + term_b, which telescopes to mu<0|0> - mu<1|1>.
struct DecompositionCurves {
  EmbeddingCurve term_a;
  EmbeddingCurve term_b;
  EmbeddingCurve total;
  EmbeddingCurve mu_control;         // mu<0|0>
  EmbeddingCurve mu_counterfactual;  // mu<0|1>
  EmbeddingCurve mu_treated;         // mu<1|1>
};

struct DecomposeOptions {
  bool conditional_observational = false;  // average the own-arm fit instead of IPCW means
};

inline DecompositionCurves decompose(const RightCensoredSample& sample,
                                     const GaussianKernel& covariate_kernel,
                                     const GaussianKernel& time_kernel,
                                     const RidgeSolveConfig& config,
                                     const std::vector<double>& grid,
                                     const DecomposeOptions& options = {}) {
  auto [control_data, treated_data] = split_arms(sample);
  const WeightedArm control = build_weighted_arm(std::move(control_data));
  const WeightedArm treated = build_weighted_arm(std::move(treated_data));

  DecompositionCurves out;
  if (options.conditional_observational) {
    out.mu_control = observational_embedding_conditional(control, covariate_kernel, time_kernel,
                                                         config, grid, "mu<0|0>");
    out.mu_treated = observational_embedding_conditional(treated, covariate_kernel, time_kernel,
                                                         config, grid, "mu<1|1>");
  } else {
    out.mu_control = observational_embedding(control, time_kernel, grid, "mu<0|0>");
    out.mu_treated = observational_embedding(treated, time_kernel, grid, "mu<1|1>");
  }
  out.mu_counterfactual =
      counterfactual_embedding(control, detail::covariate_matrix(treated.arm_data),
                               covariate_kernel, time_kernel, config, grid, "mu<0|1>");
  out.term_a = curve_difference(out.mu_control, out.mu_counterfactual, "term_a");
  out.term_b = curve_difference(out.mu_counterfactual, out.mu_treated, "term_b");
  out.total = curve_sum(out.term_a, out.term_b, "total");
  return out;
}

}  // namespace cse
