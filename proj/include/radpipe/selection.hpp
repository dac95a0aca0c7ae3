#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radpipe/matrix.hpp"

namespace radpipe {

// Column statistics learned on training rows only; validation rows are
// transformed with these, never with their own statistics.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;          // population std; 0 for constant columns
  std::vector<bool> constant;

  Matrix apply(const Matrix& x) const;
  void apply_in_place(Matrix& x) const;
};

// standardize: non-constant columns to mean 0 / std 1, constant columns to 0.
std::pair<Matrix, Scaler> standardize(const Matrix& x);

struct LassoFit {
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimize (1/2n) ||y - Xw - b||^2 + lambda ||w||_1 by cyclic coordinate
// descent with soft thresholding. Columns must be standardized (so each
// coordinate update has unit curvature); constant columns keep weight 0.
LassoFit lasso_fit(const Matrix& x_std, const std::vector<double>& y, double lambda,
                   double tol = 1e-7, int max_iter = 100000,
                   const std::vector<double>* warm_start = nullptr);

// Smallest lambda that drives every coefficient to zero.
double lasso_lambda_max(const Matrix& x_std, const std::vector<double>& y);

// Log-spaced grid from lambda_max down to lambda_max * min_ratio.
std::vector<double> make_lambda_grid(double lambda_max, int count = 50,
                                     double min_ratio = 1e-3);

struct SelectedFeatures {
  std::vector<std::string> names;   // nonzero-weight features, canonical order
  std::vector<size_t> indices;      // column indices into the training matrix
  double lambda = 0.0;
  bool used_fallback = false;       // all-zero selection fell back to the
                                    // largest lambda with >= 1 nonzero weight
  std::vector<double> cv_mean_error;  // per grid lambda
  std::vector<double> cv_se;
  std::vector<double> grid;
};

// Inner k-fold cross-validated squared error chooses lambda with the
// one-standard-error rule toward sparser (larger-lambda) models.
SelectedFeatures select_features(const Matrix& x_std, const std::vector<double>& y,
                                 const std::vector<std::string>& names,
                                 const std::vector<double>& lambda_grid, int k,
                                 uint64_t seed);

}  // namespace radpipe
