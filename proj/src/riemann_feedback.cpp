#include "rflab/riemann_feedback.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rflab/errors.hpp"

namespace rflab {

namespace {

double integrand(double v, double alpha) {
  return std::sqrt(1.0 - alpha * std::exp(-v * v));
}

// Composite trapezoid over [a,b] with Richardson extrapolation, refined until
// the halving step stabilizes.
double integrate_segment(double a, double b, double alpha) {
  const int kMaxDoublings = 12;
  int n = 4;
  double h = (b - a) / n;
  double t = 0.5 * (integrand(a, alpha) + integrand(b, alpha));
  for (int i = 1; i < n; ++i) t += integrand(a + i * h, alpha);
  t *= h;
  double richardson = t;
  for (int step = 0; step < kMaxDoublings; ++step) {
    double mid_sum = 0.0;
    for (int i = 0; i < n; ++i) mid_sum += integrand(a + (i + 0.5) * h, alpha);
    const double t2 = 0.5 * t + 0.5 * h * mid_sum;
    richardson = (4.0 * t2 - t) / 3.0;
    if (std::fabs(t2 - t) < 1e-13 * std::max(1.0, std::fabs(t2))) break;
    t = t2;
    n *= 2;
    h *= 0.5;
  }
  return richardson;
}

}  // namespace

XiTable build_xi_table(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("xi table requires 0 <= alpha < 1");
  }
  XiTable table;
  table.alpha = alpha;
  // Dense where the integrand bends (up to ~2-3 sigma), coarse out to 8.
  for (int i = 0; i <= 300; ++i) table.grid.push_back(i * 0.01);
  for (int i = 1; i <= 50; ++i) table.grid.push_back(3.0 + i * 0.1);

  table.values.resize(table.grid.size());
  table.values[0] = 0.0;
  for (size_t i = 1; i < table.grid.size(); ++i) {
    table.values[i] =
        table.values[i - 1] + integrate_segment(table.grid[i - 1], table.grid[i], alpha);
  }
  table.tail_slope = integrand(table.grid.back(), alpha);
  return table;
}

double xi(double x, const XiTable& table) {
  const double ax = std::fabs(x);
  double v;
  if (ax >= table.grid.back()) {
    v = table.values.back() + table.tail_slope * (ax - table.grid.back());
  } else {
    const auto it = std::upper_bound(table.grid.begin(), table.grid.end(), ax);
    const size_t hi = static_cast<size_t>(it - table.grid.begin());
    const size_t lo = hi - 1;
    const double t = (ax - table.grid[lo]) / (table.grid[hi] - table.grid[lo]);
    v = table.values[lo] + t * (table.values[hi] - table.values[lo]);
  }
  return x < 0.0 ? -v : v;
}

GaussianFit fit_gaussian(const Matrix& positive_rows) {
  const int n = positive_rows.rows;
  const int w = positive_rows.cols;
  if (n < 2) throw std::invalid_argument("gaussian fit needs at least 2 samples");

  GaussianFit fit;
  fit.mu.assign(w, 0.0);
  for (int a = 0; a < n; ++a) {
    const auto r = positive_rows.row(a);
    for (int c = 0; c < w; ++c) fit.mu[c] += r[c];
  }
  for (double& v : fit.mu) v /= n;

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(w, w);
  Eigen::VectorXd diff(w);
  for (int a = 0; a < n; ++a) {
    const auto r = positive_rows.row(a);
    for (int c = 0; c < w; ++c) diff[c] = r[c] - fit.mu[c];
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(diff, 1.0 / n);
  }
  scatter = scatter.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
  if (eig.info() != Eigen::Success) throw NumericError("scatter eigendecomposition failed");

  const double floor = variance_floor(std::max(scatter.trace(), 0.0) / w);
  fit.rotation = Matrix(w, w);
  fit.sigma.resize(w);
  // Eigen returns ascending eigenvalues; emit axes by decreasing variance.
  for (int k = 0; k < w; ++k) {
    const int src = w - 1 - k;
    fit.sigma[k] = std::sqrt(std::max(eig.eigenvalues()[src], floor));
    for (int i = 0; i < w; ++i) fit.rotation.at(i, k) = eig.eigenvectors()(i, src);
  }
  return fit;
}

RiemannModel fit_riemann(const Matrix& positive_rows, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("riemann model requires 0 < alpha < 1");
  }
  GaussianFit fit = fit_gaussian(positive_rows);
  RiemannModel model;
  model.mu = std::move(fit.mu);
  model.rotation = std::move(fit.rotation);
  model.sigma = std::move(fit.sigma);
  model.alpha = alpha;
  model.xi_table = build_xi_table(alpha);
  return model;
}

double riemann_distance(std::span<const double> y, const RiemannModel& model) {
  if (y.size() != model.sigma.size()) {
    throw std::invalid_argument("riemann_distance dimension mismatch");
  }
  const double inv_root = 1.0 / std::sqrt(1.0 - model.alpha);
  double acc = 0.0;
  for (size_t k = 0; k < y.size(); ++k) {
    const double t = model.sigma[k] * inv_root * xi(y[k] / model.sigma[k], model.xi_table);
    acc += t * t;
  }
  return std::sqrt(acc);
}

std::vector<double> riemann_score(const QuerySpaceMatrix& rows, const RiemannModel& model) {
  const int w = static_cast<int>(model.sigma.size());
  if (rows.word_count() != w) throw std::invalid_argument("riemann_score schema mismatch");

  std::vector<double> scores(rows.items());
  std::vector<double> y(w);
  std::vector<double> centered(w);
  for (int a = 0; a < rows.items(); ++a) {
    const auto r = rows.row(a);
    for (int c = 0; c < w; ++c) centered[c] = r[c] - model.mu[c];
    for (int k = 0; k < w; ++k) {
      double acc = 0.0;
      for (int i = 0; i < w; ++i) acc += model.rotation.at(i, k) * centered[i];
      y[k] = acc;
    }
    scores[a] = riemann_distance(y, model);
  }
  return scores;
}

}  // namespace rflab
