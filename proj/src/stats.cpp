#include "settlemorph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "settlemorph/error.hpp"
#include "settlemorph/rng.hpp"

namespace settlemorph {

void RegressionDataset::validate() const {
  if (features.rows() != targets.size())
    throw InvalidArgument("dataset: feature rows and target count differ");
  if (!city_ids.empty() && city_ids.size() != rows())
    throw InvalidArgument("dataset: city_ids count differs from row count");
  if (!feature_names.empty() && feature_names.size() != cols())
    throw InvalidArgument("dataset: feature_names count differs from column count");
  if (rows() < 2) throw InvalidArgument("dataset: need at least 2 rows");
  if (cols() < 1) throw InvalidArgument("dataset: need at least 1 feature");
  if (!features.allFinite() || !targets.allFinite())
    throw InvalidArgument("dataset: non-finite entry");
}

RegressionDataset RegressionDataset::subset(std::span<const std::size_t> indices) const {
  RegressionDataset out;
  out.feature_names = feature_names;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.targets.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(indices[i]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(src);
    out.targets(static_cast<Eigen::Index>(i)) = targets(src);
    if (!city_ids.empty()) out.city_ids.push_back(city_ids[indices[i]]);
  }
  return out;
}

// ---------------------------------------------------------------- correlation

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least 2 observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double chatterjee(std::span<const double> x, std::span<const double> y, std::uint64_t seed) {
  if (x.size() != y.size()) throw InvalidArgument("chatterjee: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("chatterjee: need at least 2 observations");

  rng::Engine engine(seed);
  std::vector<std::uint64_t> tie_key(n);
  for (auto& k : tie_key) k = engine();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    if (tie_key[a] != tie_key[b]) return tie_key[a] < tie_key[b];
    return a < b;
  });

  std::vector<double> sorted_y(y.begin(), y.end());
  std::sort(sorted_y.begin(), sorted_y.end());
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = y[order[i]];
    rank[i] = static_cast<double>(std::upper_bound(sorted_y.begin(), sorted_y.end(), yi) -
                                  sorted_y.begin());
  }
  double increments = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) increments += std::abs(rank[i + 1] - rank[i]);
  const double nn = static_cast<double>(n);
  return 1.0 - 3.0 * increments / (nn * nn - 1.0);
}

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns,
                                     CorrelationMethod method, std::uint64_t seed) {
  if (names.size() != columns.size())
    throw InvalidArgument("correlation_matrix: names and columns differ in count");
  CorrelationMatrix out;
  out.names = names;
  const std::size_t m = columns.size();
  out.values.assign(m, std::vector<std::optional<double>>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (method == CorrelationMethod::Pearson && j < i) {
        out.values[i][j] = out.values[j][i];
        continue;
      }
      try {
        if (method == CorrelationMethod::Pearson) {
          const double v = pearson(columns[i], columns[j]);
          out.values[i][j] = i == j ? 1.0 : v;
        } else {
          out.values[i][j] = chatterjee(columns[i], columns[j], seed);
        }
      } catch (const InvalidArgument&) {
        out.values[i][j] = std::nullopt;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- models

namespace {

Vector solve_symmetric(const Matrix& a, const Vector& b, const std::string& what) {
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw SingularSystemError(what + ": system is not positive definite (try lambda > 0)");
  const Vector d = ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  const double floor =
      static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * scale;
  if (!(scale > 0.0) || d.minCoeff() <= floor)
    throw SingularSystemError(what + ": system is numerically singular (try lambda > 0)");
  Vector x = ldlt.solve(b);
  if (!x.allFinite()) throw SingularSystemError(what + ": solve produced non-finite values");
  return x;
}

Vector to_vector(std::span<const double> x) {
  return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 1) throw InvalidArgument("standardizer: no rows");
  Standardizer s;
  s.means = x.colwise().mean().transpose();
  s.scales.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.means(j)).square().mean();
    if (!(var > 0.0))
      throw InvalidArgument("standardizer: feature " + std::to_string(j) + " is constant");
    s.scales(j) = std::sqrt(var);
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t p) {
  return {Vector::Zero(static_cast<Eigen::Index>(p)), Vector::Ones(static_cast<Eigen::Index>(p))};
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != means.size()) throw InvalidArgument("standardizer: dimension mismatch");
  return (x.rowwise() - means.transpose()).array().rowwise() / scales.transpose().array();
}

Vector Standardizer::apply_row(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != means.size())
    throw InvalidArgument("standardizer: dimension mismatch");
  return (to_vector(x) - means).cwiseQuotient(scales);
}

double LinearModel::predict(std::span<const double> x) const {
  return intercept + coefficients.dot(standardizer.apply_row(x));
}

Vector LinearModel::predict(const Matrix& x) const {
  return (standardizer.apply(x) * coefficients).array() + intercept;
}

LinearModel fit_ridge(const Matrix& x, const Vector& y, double lambda, bool standardize) {
  if (!(lambda >= 0.0)) throw InvalidArgument("ridge: lambda must be >= 0");
  if (x.rows() != y.size() || x.rows() < 1) throw InvalidArgument("ridge: shape mismatch");
  LinearModel model;
  model.lambda = lambda;
  model.standardizer = standardize ? Standardizer::fit(x)
                                   : Standardizer::identity(static_cast<std::size_t>(x.cols()));
  const Matrix z = model.standardizer.apply(x);
  const Vector mu = z.colwise().mean().transpose();
  const double y_mean = y.mean();
  const Matrix zc = z.rowwise() - mu.transpose();
  const Vector yc = y.array() - y_mean;
  Matrix gram = zc.transpose() * zc;
  gram.diagonal().array() += lambda;
  model.coefficients = solve_symmetric(gram, zc.transpose() * yc,
                                       lambda == 0.0 ? "linear regression" : "ridge regression");
  model.intercept = y_mean - mu.dot(model.coefficients);
  return model;
}

LinearModel fit_linear(const Matrix& x, const Vector& y) { return fit_ridge(x, y, 0.0, false); }

LinearModel fit_linear_min_norm(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size() || x.rows() < 1) throw InvalidArgument("linear regression: shape mismatch");
  LinearModel model;
  model.standardizer = Standardizer::identity(static_cast<std::size_t>(x.cols()));
  const Vector mu = x.colwise().mean().transpose();
  const double y_mean = y.mean();
  const Matrix xc = x.rowwise() - mu.transpose();
  const Vector yc = y.array() - y_mean;
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xc);
  model.coefficients = cod.solve(yc);
  if (!model.coefficients.allFinite())
    throw SingularSystemError("linear regression: solve produced non-finite values");
  model.intercept = y_mean - mu.dot(model.coefficients);
  return model;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * sq);
}

Matrix rbf_gram(const Matrix& x, double gamma) {
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

KrrModel krr_fit(const Matrix& x, const Vector& y, double lambda, double gamma, KrrOptions options) {
  if (!(lambda >= 0.0)) throw InvalidArgument("krr: lambda must be >= 0");
  if (!(gamma > 0.0)) throw InvalidArgument("krr: gamma must be > 0");
  if (x.rows() != y.size() || x.rows() < 1) throw InvalidArgument("krr: shape mismatch");
  KrrModel model;
  model.lambda = lambda;
  model.gamma = gamma;
  model.standardizer = options.standardize
                           ? Standardizer::fit(x)
                           : Standardizer::identity(static_cast<std::size_t>(x.cols()));
  model.support_inputs = model.standardizer.apply(x);
  model.target_offset = options.center_targets ? y.mean() : 0.0;
  Matrix system = rbf_gram(model.support_inputs, gamma);
  system.diagonal().array() += lambda;
  model.dual_coefficients =
      solve_symmetric(system, (y.array() - model.target_offset).matrix(), "kernel ridge");
  return model;
}

double KrrModel::predict(std::span<const double> x) const {
  const Vector z = standardizer.apply_row(x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < support_inputs.rows(); ++i) {
    sum += dual_coefficients(i) * std::exp(-gamma * (support_inputs.row(i).transpose() - z).squaredNorm());
  }
  return target_offset + sum;
}

Vector KrrModel::predict(const Matrix& x) const {
  Vector out(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
    out(i) = predict(row);
  }
  return out;
}

double krr_predict(const KrrModel& model, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != model.support_inputs.cols())
    throw InvalidArgument("krr_predict: expected " + std::to_string(model.support_inputs.cols()) +
                          " features, got " + std::to_string(x.size()));
  return model.predict(x);
}

// ---------------------------------------------------------------- validation

RegressionMetrics evaluate(std::span<const double> predictions, std::span<const double> targets,
                           std::size_t feature_count) {
  if (predictions.size() != targets.size()) throw InvalidArgument("evaluate: length mismatch");
  const std::size_t n = targets.size();
  if (n < 2) throw InvalidArgument("evaluate: need at least 2 samples");
  if (n <= feature_count + 1)
    throw InvalidArgument("evaluate: adjusted R2 needs n > p + 1 (n = " + std::to_string(n) +
                          ", p = " + std::to_string(feature_count) + ")");
  const double nn = static_cast<double>(n);
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / nn;
  double ss_res = 0.0;
  double abs_sum = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = predictions[i] - targets[i];
    ss_res += e * e;
    abs_sum += std::abs(e);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw InvalidArgument("evaluate: R2 undefined for constant targets");
  RegressionMetrics m;
  m.mse = ss_res / nn;
  m.mae = abs_sum / nn;
  m.r2 = 1.0 - ss_res / ss_tot;
  m.adj_r2 = 1.0 - (1.0 - m.r2) * (nn - 1.0) / (nn - static_cast<double>(feature_count) - 1.0);
  return m;
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross-validation: folds must be >= 2");
  if (folds > n)
    throw InvalidArgument("cross-validation: " + std::to_string(folds) + " folds leave a fold with < 1 sample (n = " +
                          std::to_string(n) + ")");
  const auto perm = rng::permutation(n, seed);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < n; ++i) out[i % folds].push_back(perm[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

namespace {

template <typename FitPredict>
double cv_mse(const Matrix& x, const Vector& y, const std::vector<std::vector<std::size_t>>& folds,
              FitPredict&& fit_predict) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  double total = 0.0;
  for (const auto& fold : folds) {
    std::vector<bool> held(n, false);
    for (const auto i : fold) held[i] = true;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i)
      if (!held[i]) train.push_back(i);
    Matrix xt(static_cast<Eigen::Index>(train.size()), x.cols());
    Vector yt(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      xt.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(train[i]));
      yt(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(train[i]));
    }
    Matrix xv(static_cast<Eigen::Index>(fold.size()), x.cols());
    Vector yv(static_cast<Eigen::Index>(fold.size()));
    for (std::size_t i = 0; i < fold.size(); ++i) {
      xv.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(fold[i]));
      yv(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(fold[i]));
    }
    Vector pred;
    try {
      pred = fit_predict(xt, yt, xv);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
    total += (pred - yv).squaredNorm() / static_cast<double>(fold.size());
  }
  return total / static_cast<double>(folds.size());
}

bool nearly_equal(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

CvResult select_best(std::vector<CvCell> table) {
  CvResult out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& c = table[i];
    const auto& b = table[best];
    if (nearly_equal(c.mean_mse, b.mean_mse)) {
      if (c.lambda > b.lambda || (c.lambda == b.lambda && c.gamma < b.gamma)) best = i;
    } else if (c.mean_mse < b.mean_mse) {
      best = i;
    }
  }
  if (!std::isfinite(table[best].mean_mse))
    throw SingularSystemError("cross-validation: every grid cell failed to fit");
  out.best_lambda = table[best].lambda;
  out.best_gamma = table[best].gamma;
  out.table = std::move(table);
  return out;
}

}  // namespace

CvResult grid_search_cv(const Matrix& x, const Vector& y, std::span<const double> lambda_grid,
                        std::span<const double> gamma_grid, std::size_t folds, std::uint64_t seed,
                        KrrOptions options) {
  if (lambda_grid.empty() || gamma_grid.empty())
    throw InvalidArgument("grid search: grids must be nonempty");
  const auto fold_sets = make_folds(static_cast<std::size_t>(x.rows()), folds, seed);
  std::vector<CvCell> table;
  for (const double lambda : lambda_grid) {
    for (const double gamma : gamma_grid) {
      const double mse = cv_mse(x, y, fold_sets, [&](const Matrix& xt, const Vector& yt, const Matrix& xv) {
        return krr_fit(xt, yt, lambda, gamma, options).predict(xv);
      });
      table.push_back({lambda, gamma, mse});
    }
  }
  return select_best(std::move(table));
}

CvResult grid_search_cv_ridge(const Matrix& x, const Vector& y, std::span<const double> lambda_grid,
                              std::size_t folds, std::uint64_t seed, bool standardize) {
  if (lambda_grid.empty()) throw InvalidArgument("grid search: grid must be nonempty");
  const auto fold_sets = make_folds(static_cast<std::size_t>(x.rows()), folds, seed);
  std::vector<CvCell> table;
  for (const double lambda : lambda_grid) {
    const double mse = cv_mse(x, y, fold_sets, [&](const Matrix& xt, const Vector& yt, const Matrix& xv) {
      return fit_ridge(xt, yt, lambda, standardize).predict(xv);
    });
    table.push_back({lambda, 0.0, mse});
  }
  return select_best(std::move(table));
}

std::pair<RegressionDataset, RegressionDataset> train_test_split(const RegressionDataset& data,
                                                                 double test_fraction,
                                                                 std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidArgument("train_test_split: fraction must lie in (0, 1)");
  const std::size_t n = data.rows();
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
  if (n_test == 0 || n_test == n) throw InvalidArgument("train_test_split: a side would be empty");
  auto perm = rng::permutation(n, seed);
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.subset(train), data.subset(test)};
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("log_grid: bad range");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

}  // namespace settlemorph
