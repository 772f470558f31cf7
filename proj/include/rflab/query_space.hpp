#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "rflab/feature_store.hpp"
#include "rflab/numeric.hpp"

namespace rflab {

enum class PerSpaceMetric { kEuclidean, kManhattan };

// Reduced W-dimensional representation: coordinate c of an item is its
// distance to the query in word space c, so the query sits at the origin.
struct QuerySpaceMatrix {
  Matrix coords;  // one row per item, W columns
  QueryPoint query_used;
  bool log_transformed = false;
  double epsilon = 0.0;

  int items() const { return coords.rows; }
  int word_count() const { return coords.cols; }
  std::span<const double> row(int a) const { return coords.row(a); }
};

QuerySpaceMatrix build_query_space(const Dataset& dataset, const QueryPoint& query,
                                   PerSpaceMetric metric = PerSpaceMetric::kEuclidean);

// Same, over a subset of dataset rows (row i of the result corresponds to
// rows[i]).
QuerySpaceMatrix build_query_space(const Dataset& dataset, std::span<const int> rows,
                                   const QueryPoint& query,
                                   PerSpaceMetric metric = PerSpaceMetric::kEuclidean);

// Entry-wise log(entry + epsilon); rejects a second application.
QuerySpaceMatrix log_transform(const QuerySpaceMatrix& m, double epsilon = 1e-6);

// [sum_d weights_d |u_d - v_d|^p]^(1/p), p >= 1.
double minkowski_distance(std::span<const double> u, std::span<const double> v,
                          std::span<const double> weights, double p);

void write_query_space(const QuerySpaceMatrix& m, std::ostream& out);

}  // namespace rflab
