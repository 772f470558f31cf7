#include "rflab/classic_feedback.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rflab/errors.hpp"
#include "rflab/kernels.hpp"

namespace rflab {

namespace {

struct ResolvedPositives {
  std::vector<int> rows;
  std::vector<double> weights;
  double weight_sum = 0.0;
};

ResolvedPositives resolve_positives(const FeedbackSet& feedback, const Dataset& dataset) {
  feedback.validate();
  ResolvedPositives out;
  out.rows.reserve(feedback.positives.size());
  out.weights.reserve(feedback.positives.size());
  for (const auto& [id, w] : feedback.positives) {
    out.rows.push_back(dataset.index_of(id));
    out.weights.push_back(w);
    out.weight_sum += w;
  }
  return out;
}

std::vector<std::span<const double>> row_spans(const Dataset& dataset,
                                               std::span<const int> rows) {
  std::vector<std::span<const double>> out;
  out.reserve(rows.size());
  for (int a : rows) out.push_back(dataset.row(a));
  return out;
}

}  // namespace

QueryPoint rocchio_update(const QueryPoint& q0, const QueryPoint& qt,
                          const FeedbackSet& feedback, const Dataset& dataset,
                          const RocchioCoefficients& coeffs) {
  const FeatureSchema& schema = dataset.schema();
  q0.validate(schema);
  qt.validate(schema);
  if (feedback.positives.empty() && feedback.negatives.empty()) return qt;

  const ResolvedPositives pos = resolve_positives(feedback, dataset);
  std::vector<int> neg_rows;
  neg_rows.reserve(feedback.negatives.size());
  for (const auto& id : feedback.negatives) neg_rows.push_back(dataset.index_of(id));

  QueryPoint out = QueryPoint::zeros(schema);
  for (int c = 0; c < schema.word_count(); ++c) {
    auto& dst = out.words[c];
    for (int d = 0; d < schema.dims[c]; ++d) dst[d] = coeffs.alpha_q0 * q0.words[c][d];
    if (!pos.rows.empty() && pos.weight_sum > 0.0) {
      for (size_t i = 0; i < pos.rows.size(); ++i) {
        const auto w = dataset.word(pos.rows[i], c);
        const double f = coeffs.beta_pos * pos.weights[i] / pos.weight_sum;
        for (int d = 0; d < schema.dims[c]; ++d) dst[d] += f * w[d];
      }
    }
    if (!neg_rows.empty()) {
      const double f = coeffs.gamma_neg / static_cast<double>(neg_rows.size());
      for (int a : neg_rows) {
        const auto w = dataset.word(a, c);
        for (int d = 0; d < schema.dims[c]; ++d) dst[d] -= f * w[d];
      }
    }
  }
  return out;
}

MarsModel mars_fit_rows(const Matrix& rows, std::span<const double> weights) {
  if (rows.rows < 2) throw std::invalid_argument("mars needs at least 2 positive samples");
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(rows.rows, 1.0);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(wsum > 0.0)) throw std::invalid_argument("all-zero relevance weights");

  const int m = rows.cols;
  MarsModel model;
  model.sigma.assign(m, 0.0);
  std::vector<double> mean(m, 0.0);
  for (int a = 0; a < rows.rows; ++a) {
    const auto r = rows.row(a);
    for (int d = 0; d < m; ++d) mean[d] += w[a] * r[d];
  }
  for (double& v : mean) v /= wsum;
  for (int a = 0; a < rows.rows; ++a) {
    const auto r = rows.row(a);
    for (int d = 0; d < m; ++d) {
      const double diff = r[d] - mean[d];
      model.sigma[d] += w[a] * diff * diff;
    }
  }
  double trace = 0.0;
  for (double& v : model.sigma) {
    v /= wsum;
    trace += v;
  }
  model.floor = variance_floor(trace / m);
  model.inv_sigma.resize(m);
  double log_sum = 0.0;
  for (int d = 0; d < m; ++d) {
    model.sigma[d] = std::max(model.sigma[d], model.floor);
    model.inv_sigma[d] = 1.0 / model.sigma[d];
    log_sum += std::log(model.sigma[d]);
  }
  model.scale = std::exp(log_sum / m);
  return model;
}

MarsModel mars_fit(const FeedbackSet& feedback, const Dataset& dataset) {
  const ResolvedPositives pos = resolve_positives(feedback, dataset);
  if (pos.rows.size() < 2) {
    throw std::invalid_argument("mars needs at least 2 positive samples");
  }
  Matrix rows(static_cast<int>(pos.rows.size()), dataset.schema().total_dim());
  for (size_t i = 0; i < pos.rows.size(); ++i) {
    const auto r = dataset.row(pos.rows[i]);
    std::copy(r.begin(), r.end(), rows.row_ptr(static_cast<int>(i)));
  }
  return mars_fit_rows(rows, pos.weights);
}

double mars_score(std::span<const double> item, std::span<const double> query,
                  const MarsModel& model) {
  if (item.size() != query.size() || item.size() != model.sigma.size()) {
    throw std::invalid_argument("mars_score dimension mismatch");
  }
  return model.scale * kernels::weighted_squared_distance(item, query, model.inv_sigma);
}

MindReaderModel fit_affine_metric(const std::vector<std::span<const double>>& samples,
                                  std::span<const double> weights) {
  if (samples.empty()) throw std::invalid_argument("metric fit needs at least 1 sample");
  const int m = static_cast<int>(samples[0].size());
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(samples.size(), 1.0);
  if (w.size() != samples.size()) {
    throw std::invalid_argument("weight count does not match sample count");
  }
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(wsum > 0.0)) throw std::invalid_argument("all-zero relevance weights");

  MindReaderModel model;
  model.q.assign(m, 0.0);
  for (size_t a = 0; a < samples.size(); ++a) {
    for (int d = 0; d < m; ++d) model.q[d] += w[a] * samples[a][d];
  }
  for (double& v : model.q) v /= wsum;

  // Weighted scatter about q, normalized by the weight sum; the det-1 scaling
  // of the metric is invariant to this normalization.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd diff(m);
  for (size_t a = 0; a < samples.size(); ++a) {
    for (int d = 0; d < m; ++d) diff[d] = samples[a][d] - model.q[d];
    c.selfadjointView<Eigen::Lower>().rankUpdate(diff, w[a] / wsum);
  }
  c = c.selfadjointView<Eigen::Lower>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) throw NumericError("scatter eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const double lambda_max = std::max(lambda[m - 1], 0.0);
  const double cut = kRankCutoff * lambda_max;

  int rank = 0;
  for (int i = 0; i < m; ++i) {
    if (lambda[i] > cut && lambda[i] > 0.0) ++rank;
  }
  model.rank = rank;
  model.pseudo_inverse_used = rank < m;

  Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
  double log_kept = 0.0;
  for (int i = 0; i < m; ++i) {
    if (lambda[i] > cut && lambda[i] > 0.0) {
      inv[i] = 1.0 / lambda[i];
      log_kept += std::log(lambda[i]);
    }
  }
  // Full rank: M = det(C)^(1/M) C^-1. Rank deficient: M = alpha C+ with alpha
  // making the product of the R nonzero scaled values equal 1.
  const double scale = rank == m ? std::exp(log_kept / m)
                       : rank > 0 ? std::exp(log_kept / rank)
                                  : 1.0;
  Eigen::MatrixXd metric = scale * (v * inv.asDiagonal() * v.transpose());
  metric = 0.5 * (metric + metric.transpose()).eval();

  model.metric = Matrix(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) model.metric.at(i, j) = metric(i, j);
  }
  return model;
}

MindReaderModel mindreader_fit(const FeedbackSet& feedback, const Dataset& dataset) {
  const ResolvedPositives pos = resolve_positives(feedback, dataset);
  if (pos.rows.empty()) throw std::invalid_argument("mindreader needs at least 1 positive");
  return fit_affine_metric(row_spans(dataset, pos.rows), pos.weights);
}

double mindreader_score(std::span<const double> item, const MindReaderModel& model) {
  if (item.size() != model.q.size()) {
    throw std::invalid_argument("mindreader_score dimension mismatch");
  }
  const int m = static_cast<int>(item.size());
  std::vector<double> diff(m);
  for (int d = 0; d < m; ++d) diff[d] = item[d] - model.q[d];
  return sym_quadratic_form(model.metric, diff);
}

std::vector<double> optimal_space_weights(std::span<const double> a,
                                          std::vector<bool>* degenerate) {
  const int w_count = static_cast<int>(a.size());
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= w_count;
  const double floor = variance_floor(mean);

  std::vector<double> floored(a.begin(), a.end());
  if (degenerate != nullptr) degenerate->assign(w_count, false);
  double sqrt_sum = 0.0;
  for (int c = 0; c < w_count; ++c) {
    if (floored[c] < floor) {
      floored[c] = floor;
      if (degenerate != nullptr) (*degenerate)[c] = true;
    }
    sqrt_sum += std::sqrt(floored[c]);
  }
  std::vector<double> weights(w_count);
  for (int c = 0; c < w_count; ++c) weights[c] = sqrt_sum / std::sqrt(floored[c]);
  return weights;
}

RuiHuangModel rui_huang_fit(const FeedbackSet& feedback, const Dataset& dataset) {
  const ResolvedPositives pos = resolve_positives(feedback, dataset);
  if (pos.rows.empty()) throw std::invalid_argument("rui-huang needs at least 1 positive");
  if (!(pos.weight_sum > 0.0)) throw std::invalid_argument("all-zero relevance weights");

  // Relevance scores renormalized to sum 1; the optimum is invariant to this.
  std::vector<double> pi(pos.weights);
  for (double& v : pi) v /= pos.weight_sum;

  const FeatureSchema& schema = dataset.schema();
  RuiHuangModel model;
  model.query = QueryPoint::zeros(schema);
  model.spaces.reserve(schema.word_count());

  std::vector<double> a(schema.word_count(), 0.0);
  for (int c = 0; c < schema.word_count(); ++c) {
    std::vector<std::span<const double>> spans;
    spans.reserve(pos.rows.size());
    for (int row : pos.rows) spans.push_back(dataset.word(row, c));
    MindReaderModel space = fit_affine_metric(spans, pi);
    model.query.words[c] = space.q;
    for (size_t i = 0; i < spans.size(); ++i) {
      std::vector<double> diff(spans[i].size());
      for (size_t d = 0; d < diff.size(); ++d) diff[d] = spans[i][d] - space.q[d];
      a[c] += pi[i] * sym_quadratic_form(space.metric, diff);
    }
    model.spaces.push_back(std::move(space));
  }
  model.weights = optimal_space_weights(a, &model.degenerate);
  return model;
}

double rui_huang_score(std::span<const double> item_flat, const FeatureSchema& schema,
                       const RuiHuangModel& model) {
  if (item_flat.size() != static_cast<size_t>(schema.total_dim()) ||
      model.spaces.size() != static_cast<size_t>(schema.word_count())) {
    throw std::invalid_argument("rui_huang_score dimension mismatch");
  }
  double score = 0.0;
  for (int c = 0; c < schema.word_count(); ++c) {
    const auto w = item_flat.subspan(schema.offset(c), schema.dims[c]);
    const auto& space = model.spaces[c];
    std::vector<double> diff(w.size());
    for (size_t d = 0; d < w.size(); ++d) diff[d] = w[d] - space.q[d];
    score += model.weights[c] * sym_quadratic_form(space.metric, diff);
  }
  return score;
}

std::vector<std::string> rank(const Dataset& dataset, std::span<const double> scores,
                              int top_q) {
  if (scores.size() != static_cast<size_t>(dataset.size())) {
    throw std::invalid_argument("score count does not match dataset size");
  }
  if (top_q < 0 || top_q > dataset.size()) {
    throw std::invalid_argument("top_q must be within the dataset size");
  }
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (scores[lhs] != scores[rhs]) return scores[lhs] < scores[rhs];
    return dataset.id(lhs) < dataset.id(rhs);
  });
  std::vector<std::string> ids;
  ids.reserve(top_q);
  for (int i = 0; i < top_q; ++i) ids.push_back(dataset.id(order[i]));
  return ids;
}

}  // namespace rflab
