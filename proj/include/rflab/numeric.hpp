#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace rflab {

// Dense row-major matrix. All linear algebra in this project is small and
// dense; anything that needs a decomposition maps this into Eigen internally.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  std::span<const double> row(int i) const {
    return {data.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)};
  }
  double* row_ptr(int i) { return data.data() + static_cast<size_t>(i) * cols; }
};

// Floors applied wherever a reciprocal of a variance/eigenvalue is taken.
inline constexpr double kRelativeFloor = 1e-9;
inline constexpr double kAbsoluteFloor = 1e-12;
// Singular values below kRankCutoff * sigma_max are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

// Smallest admissible variance given the data scale; strictly positive even
// for all-identical samples.
inline double variance_floor(double mean_raw_variance) {
  return std::max(kRelativeFloor * mean_raw_variance, kAbsoluteFloor);
}

uint64_t splitmix64(uint64_t x);

// Deterministic child-seed derivation for (trial, repetition, ...) trees.
uint64_t mix_seed(uint64_t seed, uint64_t salt_a, uint64_t salt_b = 0);

// P[Z >= z] for a standard normal.
double normal_upper_tail(double z);

// d' M d for symmetric M; clamped at zero (M is PSD by construction wherever
// this is used, small negative values are roundoff).
double sym_quadratic_form(const Matrix& m, std::span<const double> d);

}  // namespace rflab
