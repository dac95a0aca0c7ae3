#pragma once

#include <cstddef>
#include <vector>

namespace radpipe {

// Dense row-major matrix of doubles. Feature tables are small (rows in the
// thousands, 107 columns) so this stays deliberately simple.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }

  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }

  // Column extraction; LASSO coordinate descent wants contiguous columns.
  std::vector<double> column(size_t c) const {
    std::vector<double> out(rows);
    for (size_t r = 0; r < rows; ++r) out[r] = at(r, c);
    return out;
  }

  Matrix select_columns(const std::vector<size_t>& idx) const {
    Matrix out(rows, idx.size());
    for (size_t r = 0; r < rows; ++r)
      for (size_t j = 0; j < idx.size(); ++j) out.at(r, j) = at(r, idx[j]);
    return out;
  }

  Matrix select_rows(const std::vector<size_t>& idx) const {
    Matrix out(idx.size(), cols);
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t c = 0; c < cols; ++c) out.at(i, c) = at(idx[i], c);
    return out;
  }
};

}  // namespace radpipe
