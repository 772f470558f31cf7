#include "rflab/query_space.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rflab/kernels.hpp"

namespace rflab {

namespace {

double per_space_distance(std::span<const double> w, std::span<const double> q,
                          PerSpaceMetric metric) {
  switch (metric) {
    case PerSpaceMetric::kEuclidean:
      return std::sqrt(kernels::squared_distance(w, q));
    case PerSpaceMetric::kManhattan:
      return kernels::manhattan_distance(w, q);
  }
  throw std::invalid_argument("unknown per-space metric");
}

}  // namespace

QuerySpaceMatrix build_query_space(const Dataset& dataset, std::span<const int> rows,
                                   const QueryPoint& query, PerSpaceMetric metric) {
  const FeatureSchema& schema = dataset.schema();
  query.validate(schema);

  QuerySpaceMatrix out;
  out.coords = Matrix(static_cast<int>(rows.size()), schema.word_count());
  out.query_used = query;
  for (size_t i = 0; i < rows.size(); ++i) {
    double* dst = out.coords.row_ptr(static_cast<int>(i));
    for (int c = 0; c < schema.word_count(); ++c) {
      dst[c] = per_space_distance(dataset.word(rows[i], c), query.words[c], metric);
    }
  }
  return out;
}

QuerySpaceMatrix build_query_space(const Dataset& dataset, const QueryPoint& query,
                                   PerSpaceMetric metric) {
  std::vector<int> rows(dataset.size());
  std::iota(rows.begin(), rows.end(), 0);
  return build_query_space(dataset, rows, query, metric);
}

QuerySpaceMatrix log_transform(const QuerySpaceMatrix& m, double epsilon) {
  if (m.log_transformed) throw std::invalid_argument("query space already log-transformed");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  QuerySpaceMatrix out = m;
  for (double& v : out.coords.data) v = std::log(v + epsilon);
  out.log_transformed = true;
  out.epsilon = epsilon;
  return out;
}

double minkowski_distance(std::span<const double> u, std::span<const double> v,
                          std::span<const double> weights, double p) {
  if (u.size() != v.size() || u.size() != weights.size()) {
    throw std::invalid_argument("minkowski_distance length mismatch");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("minkowski order p must be >= 1");
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("minkowski weights must be >= 0");
  }
  double acc = 0.0;
  for (size_t d = 0; d < u.size(); ++d) {
    acc += weights[d] * std::pow(std::fabs(u[d] - v[d]), p);
  }
  return std::pow(acc, 1.0 / p);
}

void write_query_space(const QuerySpaceMatrix& m, std::ostream& out) {
  out << "# query space: items = " << m.items() << ", words = " << m.word_count()
      << ", log_transformed = " << (m.log_transformed ? "yes" : "no") << "\n";
  char buf[40];
  for (int a = 0; a < m.items(); ++a) {
    const auto r = m.row(a);
    for (int c = 0; c < m.word_count(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", r[c]);
      out << (c > 0 ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace rflab
