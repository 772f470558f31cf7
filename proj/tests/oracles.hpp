#pragma once

// Independent reference computations for the tests. Everything here is
// deliberately written the slow, obvious way and shares no code with the
// library paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "rflab/feature_store.hpp"

namespace oracles {

// Adaptive Simpson quadrature.
inline double quad_simpson(const std::function<double(double)>& f, double a, double b,
                           double tol, int depth = 0) {
  const double c = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fc = f(c);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
  const double lm = 0.5 * (a + c), rm = 0.5 * (c + b);
  const double left = (c - a) / 6.0 * (fa + 4.0 * f(lm) + fc);
  const double right = (b - c) / 6.0 * (fc + 4.0 * f(rm) + fb);
  if (depth > 40 || std::fabs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return quad_simpson(f, a, c, 0.5 * tol, depth + 1) +
         quad_simpson(f, c, b, 0.5 * tol, depth + 1);
}

inline double xi_oracle(double x, double alpha, double tol = 1e-10) {
  if (x == 0.0) return 0.0;
  const auto f = [alpha](double v) { return std::sqrt(1.0 - alpha * std::exp(-v * v)); };
  const double v = quad_simpson(f, 0.0, std::fabs(x), tol);
  return x < 0.0 ? -v : v;
}

// Two-pass population variance.
inline double population_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / static_cast<double>(xs.size());
}

// Plain-domain Gaussian density.
inline double gauss_pdf(double x, double mu, double var) {
  return std::exp(-(x - mu) * (x - mu) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

// Exact binomial(n, 1/2) lower tail P[X <= s].
inline double binomial_half_tail(int n, int s) {
  double binom = 1.0;
  double sum = 0.0;
  for (int i = 0; i <= s; ++i) {
    sum += binom;
    binom = binom * (n - i) / (i + 1.0);
  }
  return sum * std::ldexp(1.0, -n);
}

// Hypergeometric pmf by exhaustive enumeration of all q-subsets of N items,
// the first m of which are marked. Only sane for small N.
inline std::vector<double> hypergeom_enumeration(int N, int m, int q) {
  std::vector<bool> mask(N, false);
  std::fill(mask.begin(), mask.begin() + q, true);
  std::sort(mask.begin(), mask.end(), std::greater<bool>());
  std::vector<long long> counts(std::min(m, q) + 1, 0);
  long long total = 0;
  do {
    int k = 0;
    for (int i = 0; i < m; ++i) k += mask[i] ? 1 : 0;
    ++counts[k];
    ++total;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  std::vector<double> pmf(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) {
    pmf[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return pmf;
}

// Nearest-centroid classification accuracy over a labeled dataset.
inline double centroid_accuracy(const rflab::Dataset& dataset) {
  const auto groups = dataset.by_category();
  std::vector<std::string> labels;
  std::vector<std::vector<double>> centroids;
  for (const auto& [label, rows] : groups) {
    std::vector<double> c(dataset.schema().total_dim(), 0.0);
    for (int a : rows) {
      const auto r = dataset.row(a);
      for (size_t d = 0; d < c.size(); ++d) c[d] += r[d];
    }
    for (double& v : c) v /= static_cast<double>(rows.size());
    labels.push_back(label);
    centroids.push_back(std::move(c));
  }
  int correct = 0;
  for (int a = 0; a < dataset.size(); ++a) {
    const auto r = dataset.row(a);
    double best = std::numeric_limits<double>::infinity();
    size_t best_idx = 0;
    for (size_t g = 0; g < centroids.size(); ++g) {
      double d2 = 0.0;
      for (size_t d = 0; d < centroids[g].size(); ++d) {
        d2 += (r[d] - centroids[g][d]) * (r[d] - centroids[g][d]);
      }
      if (d2 < best) {
        best = d2;
        best_idx = g;
      }
    }
    correct += labels[best_idx] == dataset.category(a) ? 1 : 0;
  }
  return static_cast<double>(correct) / dataset.size();
}

// Nearest-centroid ranking oracle: ids ordered by distance to the centroid of
// the given rows.
inline std::vector<std::string> centroid_ranking(const rflab::Dataset& dataset,
                                                 std::span<const int> positive_rows,
                                                 int top_q) {
  std::vector<double> centroid(dataset.schema().total_dim(), 0.0);
  for (int a : positive_rows) {
    const auto r = dataset.row(a);
    for (size_t d = 0; d < centroid.size(); ++d) centroid[d] += r[d];
  }
  for (double& v : centroid) v /= static_cast<double>(positive_rows.size());
  std::vector<std::pair<double, std::string>> scored;
  for (int a = 0; a < dataset.size(); ++a) {
    const auto r = dataset.row(a);
    double d2 = 0.0;
    for (size_t d = 0; d < centroid.size(); ++d) {
      d2 += (r[d] - centroid[d]) * (r[d] - centroid[d]);
    }
    scored.emplace_back(d2, dataset.id(a));
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> ids;
  for (int i = 0; i < top_q; ++i) ids.push_back(scored[i].second);
  return ids;
}

// Ranking by ascending value with index tie-break.
inline std::vector<int> argsort(std::span<const double> values) {
  std::vector<int> order(values.size());
  for (size_t i = 0; i < values.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  return order;
}

}  // namespace oracles
