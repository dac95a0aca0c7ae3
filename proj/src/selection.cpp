#include "radpipe/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radpipe/error.hpp"
#include "radpipe/kernels.hpp"
#include "radpipe/rng.hpp"

namespace radpipe {

namespace {

constexpr double kConstantStd = 1e-12;

}  // namespace

Matrix Scaler::apply(const Matrix& x) const {
  Matrix out = x;
  apply_in_place(out);
  return out;
}

void Scaler::apply_in_place(Matrix& x) const {
  if (x.cols != mean.size())
    fail(ErrorCode::BadArgument, "scaler: column count mismatch");
  for (size_t r = 0; r < x.rows; ++r) {
    double* row = x.row(r);
    for (size_t c = 0; c < x.cols; ++c)
      row[c] = constant[c] ? 0.0 : (row[c] - mean[c]) / stddev[c];
  }
}

std::pair<Matrix, Scaler> standardize(const Matrix& x) {
  if (x.rows < 2) fail(ErrorCode::BadArgument, "standardize: need at least 2 rows");

  Scaler s;
  s.mean.resize(x.cols);
  s.stddev.resize(x.cols);
  s.constant.resize(x.cols);

  const double n = static_cast<double>(x.rows);
  for (size_t c = 0; c < x.cols; ++c) {
    double sum = 0.0;
    for (size_t r = 0; r < x.rows; ++r) sum += x.at(r, c);
    double mean = sum / n;
    double ss = 0.0;
    for (size_t r = 0; r < x.rows; ++r) {
      double d = x.at(r, c) - mean;
      ss += d * d;
    }
    double sd = std::sqrt(ss / n);  // population std
    s.mean[c] = mean;
    bool is_const = sd <= kConstantStd * std::max(1.0, std::abs(mean));
    s.constant[c] = is_const;
    s.stddev[c] = is_const ? 0.0 : sd;
  }
  return {s.apply(x), s};
}

double lasso_lambda_max(const Matrix& x_std, const std::vector<double>& y) {
  const double n = static_cast<double>(x_std.rows);
  double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double best = 0.0;
  for (size_t c = 0; c < x_std.cols; ++c) {
    double dot = 0.0;
    for (size_t r = 0; r < x_std.rows; ++r) dot += x_std.at(r, c) * (y[r] - ybar);
    best = std::max(best, std::abs(dot) / n);
  }
  return best;
}

LassoFit lasso_fit(const Matrix& x_std, const std::vector<double>& y, double lambda,
                   double tol, int max_iter, const std::vector<double>* warm_start) {
  if (lambda < 0.0) fail(ErrorCode::BadArgument, "lasso: lambda must be >= 0");
  if (x_std.rows != y.size()) fail(ErrorCode::BadArgument, "lasso: row/label mismatch");
  for (double v : y)
    if (!std::isfinite(v)) fail(ErrorCode::BadArgument, "lasso: non-finite label");
  for (double v : x_std.data)
    if (!std::isfinite(v)) fail(ErrorCode::BadArgument, "lasso: non-finite feature");

  const size_t n = x_std.rows, p = x_std.cols;
  const double dn = static_cast<double>(n);
  const auto& k = kernels::ops();

  // contiguous columns for the kernel dot/axpy hot loop
  std::vector<std::vector<double>> cols(p);
  std::vector<double> col_sq_norm(p);  // (1/n) x_j . x_j; 1 when standardized
  for (size_t c = 0; c < p; ++c) {
    cols[c] = x_std.column(c);
    col_sq_norm[c] = k.dot(cols[c].data(), cols[c].data(), n) / dn;
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.weights.assign(p, 0.0);
  if (warm_start && warm_start->size() == p) fit.weights = *warm_start;

  // centered design: the optimal intercept is the label mean
  fit.intercept = std::accumulate(y.begin(), y.end(), 0.0) / dn;

  std::vector<double> residual(n);
  for (size_t r = 0; r < n; ++r) residual[r] = y[r] - fit.intercept;
  for (size_t c = 0; c < p; ++c)
    if (fit.weights[c] != 0.0) k.axpy(-fit.weights[c], cols[c].data(), residual.data(), n);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double max_delta = 0.0;
    for (size_t c = 0; c < p; ++c) {
      if (col_sq_norm[c] <= kConstantStd) continue;  // constant column
      double w_old = fit.weights[c];
      // rho = (1/n) x_c . (residual + x_c * w_old)
      double rho = k.dot(cols[c].data(), residual.data(), n) / dn +
                   col_sq_norm[c] * w_old;
      double w_new;
      if (rho > lambda)
        w_new = (rho - lambda) / col_sq_norm[c];
      else if (rho < -lambda)
        w_new = (rho + lambda) / col_sq_norm[c];
      else
        w_new = 0.0;
      if (w_new != w_old) {
        k.axpy(w_old - w_new, cols[c].data(), residual.data(), n);
        fit.weights[c] = w_new;
        max_delta = std::max(max_delta, std::abs(w_new - w_old));
      }
    }
    if (max_delta < tol) {
      fit.converged = true;
      ++iter;
      break;
    }
  }
  fit.iterations = iter;
  return fit;
}

std::vector<double> make_lambda_grid(double lambda_max, int count, double min_ratio) {
  if (count < 1) fail(ErrorCode::BadArgument, "lambda grid: count must be >= 1");
  if (lambda_max <= 0.0) lambda_max = 1e-3;  // degenerate flat labels
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  double log_max = std::log(lambda_max);
  double log_min = std::log(lambda_max * min_ratio);
  for (int i = 0; i < count; ++i)
    grid[i] = std::exp(log_max + (log_min - log_max) * i / (count - 1));
  return grid;
}

SelectedFeatures select_features(const Matrix& x_std, const std::vector<double>& y,
                                 const std::vector<std::string>& names,
                                 const std::vector<double>& lambda_grid, int k,
                                 uint64_t seed) {
  if (lambda_grid.empty()) fail(ErrorCode::BadArgument, "select: empty lambda grid");
  if (k < 2) fail(ErrorCode::BadArgument, "select: k must be >= 2");
  if (names.size() != x_std.cols)
    fail(ErrorCode::BadArgument, "select: name/column mismatch");

  const size_t n = x_std.rows;
  // grid sorted descending so warm starts walk the regularization path
  std::vector<double> grid = lambda_grid;
  std::sort(grid.rbegin(), grid.rend());
  const size_t g = grid.size();

  // deterministic shuffled fold assignment
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(derive_seed(seed, "lasso_cv"));
  rng.shuffle(order);
  std::vector<int> fold_of(n);
  for (size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % k);

  // per-fold squared errors along the path
  std::vector<std::vector<double>> fold_mse(g, std::vector<double>(k, 0.0));
  for (int fold = 0; fold < k; ++fold) {
    std::vector<size_t> train_idx, val_idx;
    for (size_t i = 0; i < n; ++i)
      (fold_of[i] == fold ? val_idx : train_idx).push_back(i);
    if (train_idx.empty() || val_idx.empty())
      fail(ErrorCode::BadArgument, "select: fold without rows");

    Matrix xt = x_std.select_rows(train_idx);
    std::vector<double> yt;
    yt.reserve(train_idx.size());
    for (size_t i : train_idx) yt.push_back(y[i]);

    std::vector<double> warm;
    for (size_t gi = 0; gi < g; ++gi) {
      LassoFit fit = lasso_fit(xt, yt, grid[gi], 1e-7, 100000,
                               warm.empty() ? nullptr : &warm);
      warm = fit.weights;
      double sse = 0.0;
      for (size_t i : val_idx) {
        double pred = fit.intercept;
        const double* row = x_std.row(i);
        for (size_t c = 0; c < x_std.cols; ++c) pred += row[c] * fit.weights[c];
        double d = y[i] - pred;
        sse += d * d;
      }
      fold_mse[gi][fold] = sse / static_cast<double>(val_idx.size());
    }
  }

  SelectedFeatures out;
  out.grid = grid;
  out.cv_mean_error.resize(g);
  out.cv_se.resize(g);
  for (size_t gi = 0; gi < g; ++gi) {
    double mean = std::accumulate(fold_mse[gi].begin(), fold_mse[gi].end(), 0.0) / k;
    double var = 0.0;
    for (double e : fold_mse[gi]) var += (e - mean) * (e - mean);
    var /= k;
    out.cv_mean_error[gi] = mean;
    out.cv_se[gi] = std::sqrt(var / k);
  }

  // lambda with minimal CV error, then the one-standard-error rule: the
  // largest (sparsest) lambda whose error is within one SE of the minimum
  size_t best = std::min_element(out.cv_mean_error.begin(), out.cv_mean_error.end()) -
                out.cv_mean_error.begin();
  double threshold = out.cv_mean_error[best] + out.cv_se[best];
  size_t chosen = best;
  for (size_t gi = 0; gi <= best; ++gi) {  // grid is descending in lambda
    if (out.cv_mean_error[gi] <= threshold) {
      chosen = gi;
      break;
    }
  }

  // final fit on all rows at the chosen lambda (path for warm starts)
  std::vector<double> warm;
  std::vector<std::vector<double>> path_weights(g);
  for (size_t gi = 0; gi <= chosen; ++gi) {
    LassoFit fit = lasso_fit(x_std, y, grid[gi], 1e-7, 100000,
                             warm.empty() ? nullptr : &warm);
    warm = fit.weights;
    path_weights[gi] = fit.weights;
  }

  auto nonzero_of = [&](const std::vector<double>& w) {
    std::vector<size_t> idx;
    for (size_t c = 0; c < w.size(); ++c)
      if (w[c] != 0.0) idx.push_back(c);
    return idx;
  };

  std::vector<size_t> idx = nonzero_of(path_weights[chosen]);
  out.lambda = grid[chosen];

  if (idx.empty()) {
    // walk down the path to the largest lambda with at least one nonzero
    out.used_fallback = true;
    for (size_t gi = chosen + 1; gi < g; ++gi) {
      LassoFit fit = lasso_fit(x_std, y, grid[gi], 1e-7, 100000,
                               warm.empty() ? nullptr : &warm);
      warm = fit.weights;
      idx = nonzero_of(fit.weights);
      if (!idx.empty()) {
        out.lambda = grid[gi];
        break;
      }
    }
  }

  out.indices = idx;
  for (size_t c : idx) out.names.push_back(names[c]);
  return out;
}

}  // namespace radpipe
