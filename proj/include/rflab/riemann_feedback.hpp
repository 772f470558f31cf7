#pragma once

#include <span>
#include <vector>

#include "rflab/numeric.hpp"
#include "rflab/query_space.hpp"

namespace rflab {

// Precomputed table of Xi(x) = integral_0^x sqrt(1 - alpha exp(-v^2)) dv on a
// non-uniform grid, dense where the integrand curves (0..3), coarser out to 8,
// linear beyond. Lookups are odd-extended and O(log n).
struct XiTable {
  double alpha = 0.0;
  std::vector<double> grid;    // abscissae, grid[0] == 0
  std::vector<double> values;  // Xi at the knots, values[0] == 0
  double tail_slope = 1.0;
};

XiTable build_xi_table(double alpha);
double xi(double x, const XiTable& table);

struct GaussianFit {
  std::vector<double> mu;     // column means
  Matrix rotation;            // orthogonal, y = U'(x - mu) decorrelates
  std::vector<double> sigma;  // per rotated axis standard deviation, floored
};

// Population-convention Gaussian fit of N x W sample rows via the scatter
// eigendecomposition; axes ordered by decreasing sigma.
GaussianFit fit_gaussian(const Matrix& positive_rows);

struct RiemannModel {
  std::vector<double> mu;
  Matrix rotation;
  std::vector<double> sigma;
  double alpha = 0.5;
  XiTable xi_table;
};

RiemannModel fit_riemann(const Matrix& positive_rows, double alpha = 0.5);

// Geodesic distance from the origin of the rotated/centered frame:
// D = sqrt( sum_k (sigma_k/sqrt(1-alpha) * Xi(y_k/sigma_k))^2 ).
double riemann_distance(std::span<const double> y, const RiemannModel& model);

// Rotates/centers every row and scores it by riemann_distance.
std::vector<double> riemann_score(const QuerySpaceMatrix& rows, const RiemannModel& model);

}  // namespace rflab
