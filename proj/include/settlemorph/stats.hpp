#pragma once

// Correlation analysis, linear / ridge / kernel ridge regression, validation metrics
// and the train/test + cross-validation protocol.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace settlemorph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct RegressionDataset {
  std::vector<std::string> feature_names;
  Matrix features;  // n x p
  Vector targets;   // n
  std::vector<std::string> city_ids;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(features.cols()); }

  /// Throws InvalidArgument unless shapes agree, n >= 2, p >= 1 and every entry is finite.
  void validate() const;
  RegressionDataset subset(std::span<const std::size_t> indices) const;
};

// ---------------------------------------------------------------- correlation

/// Product-moment correlation. Throws InvalidArgument on length mismatch, n < 2 or a
/// constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Chatterjee's rank-increment coefficient xi_n(x, y). Pairs are ordered by x with ties in x
/// broken uniformly at random from `seed`; r_i = #{j : y_j <= y_(i)}. Not symmetric.
double chatterjee(std::span<const double> x, std::span<const double> y, std::uint64_t seed = 0);

enum class CorrelationMethod { Pearson, Chatterjee };

struct CorrelationMatrix {
  std::vector<std::string> names;
  /// values[i][j] = coef(column i, column j); nullopt where the coefficient is undefined.
  std::vector<std::vector<std::optional<double>>> values;
};

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns,
                                     CorrelationMethod method, std::uint64_t seed = 0);

// ---------------------------------------------------------------- models

/// Per-feature z-score parameters (population standard deviation).
struct Standardizer {
  Vector means;
  Vector scales;

  /// Throws InvalidArgument when a feature is constant.
  static Standardizer fit(const Matrix& x);
  static Standardizer identity(std::size_t p);
  Matrix apply(const Matrix& x) const;
  Vector apply_row(std::span<const double> x) const;
};

/// y = intercept + coefficients . standardize(x). The intercept is never penalised.
struct LinearModel {
  double intercept = 0.0;
  Vector coefficients;
  double lambda = 0.0;
  Standardizer standardizer;

  double predict(std::span<const double> x) const;
  Vector predict(const Matrix& x) const;
};

/// Ordinary least squares. Throws SingularSystemError on a rank-deficient design.
LinearModel fit_linear(const Matrix& x, const Vector& y);

/// Minimum-norm least squares on the centred design (complete orthogonal decomposition).
/// Unlike fit_linear it accepts rank-deficient designs, e.g. the exactly collinear AI/NLSI pair.
LinearModel fit_linear_min_norm(const Matrix& x, const Vector& y);

/// Minimises 1/2 |y - Xb - b0|^2 + lambda/2 |b|^2 in closed form on centred data.
LinearModel fit_ridge(const Matrix& x, const Vector& y, double lambda, bool standardize = false);

struct KrrOptions {
  bool standardize = true;
  bool center_targets = true;
};

struct KrrModel {
  Matrix support_inputs;  // standardized training features
  Vector dual_coefficients;
  double lambda = 0.0;
  double gamma = 1.0;
  Standardizer standardizer;
  double target_offset = 0.0;  // training-target mean when centred, else 0

  double predict(std::span<const double> x) const;
  Vector predict(const Matrix& x) const;
};

/// exp(-gamma * |a - b|^2).
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);
Matrix rbf_gram(const Matrix& x, double gamma);

/// Solves (K + lambda I) alpha = y - offset with an LDL^T factorisation.
/// Throws SingularSystemError when the system is numerically singular.
KrrModel krr_fit(const Matrix& x, const Vector& y, double lambda, double gamma,
                 KrrOptions options = {});
double krr_predict(const KrrModel& model, std::span<const double> x);

// ---------------------------------------------------------------- validation

struct RegressionMetrics {
  double mse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
};

/// Throws InvalidArgument when lengths differ, n < 2, n <= p + 1, or targets are constant.
RegressionMetrics evaluate(std::span<const double> predictions, std::span<const double> targets,
                           std::size_t feature_count);

struct CvCell {
  double lambda = 0.0;
  double gamma = 0.0;
  double mean_mse = 0.0;
};

struct CvResult {
  double best_lambda = 0.0;
  double best_gamma = 0.0;
  std::vector<CvCell> table;  // grid order: lambda-major
};

/// k-fold assignment from a seeded shuffle; fold f holds shuffled positions i with i % folds == f.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed);

/// Minimiser of mean validation MSE; ties go to the larger lambda, then the smaller gamma.
CvResult grid_search_cv(const Matrix& x, const Vector& y, std::span<const double> lambda_grid,
                        std::span<const double> gamma_grid, std::size_t folds, std::uint64_t seed,
                        KrrOptions options = {});

/// Ridge-only variant (gamma unused, reported as 0).
CvResult grid_search_cv_ridge(const Matrix& x, const Vector& y, std::span<const double> lambda_grid,
                              std::size_t folds, std::uint64_t seed, bool standardize = true);

/// Test side gets floor(n * test_fraction) rows, drawn by a seeded shuffle.
std::pair<RegressionDataset, RegressionDataset> train_test_split(const RegressionDataset& data,
                                                                 double test_fraction,
                                                                 std::uint64_t seed);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace settlemorph
