#pragma once

// Internal helpers shared by the radiomics feature families.

#include <cmath>
#include <vector>

#include "radpipe/radiomics.hpp"

namespace radpipe::detail {

inline double log2p(double p) { return std::log2(p); }  // callers guarantee p > 0

// Accumulates -sum(p * log2(p)) over strictly positive probabilities.
inline double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline double sq(double v) { return v * v; }

constexpr double kDegenerateEps = 1e-12;

// Sorted eigenvalues (descending) of a small symmetric matrix, by cyclic
// Jacobi rotations. Used for the GLCM MCC feature.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

}  // namespace radpipe::detail
