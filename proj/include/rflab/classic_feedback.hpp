#pragma once

#include <span>
#include <string>
#include <vector>

#include "rflab/feature_store.hpp"
#include "rflab/numeric.hpp"

namespace rflab {

// Classic SMART defaults; the query-rewriting weights are configurable
// because no single convention is canonical.
struct RocchioCoefficients {
  double alpha_q0 = 1.0;
  double beta_pos = 0.75;
  double gamma_neg = 0.15;
};

// Per-space q' = alpha*q0 + beta*mean(positives) - gamma*mean(negatives).
// Empty feedback returns qt verbatim (stability); a missing side contributes
// zero. Positive means are weighted by the relevance scores.
QueryPoint rocchio_update(const QueryPoint& q0, const QueryPoint& qt,
                          const FeedbackSet& feedback, const Dataset& dataset,
                          const RocchioCoefficients& coeffs = {});

// Inverse-variance axis weighting.
struct MarsModel {
  std::vector<double> sigma;  // per-axis variance, floored
  double floor = 0.0;
  // caches filled by the fitters
  std::vector<double> inv_sigma;
  double scale = 1.0;  // (prod sigma)^(1/M)
};

MarsModel mars_fit(const FeedbackSet& feedback, const Dataset& dataset);
// Same fit on explicit sample rows (used for MARS on the query space).
MarsModel mars_fit_rows(const Matrix& rows, std::span<const double> weights = {});
// Squared weighted distance (prod sigma)^(1/M) * sum (w_d - q_d)^2 / sigma_d.
double mars_score(std::span<const double> item, std::span<const double> query,
                  const MarsModel& model);

// Optimal affine metric: q is the weighted sample mean, M the det-1 scaled
// inverse of the weighted scatter, with an SVD pseudo-inverse when the
// scatter is rank deficient (N < M).
struct MindReaderModel {
  std::vector<double> q;
  Matrix metric;
  int rank = 0;
  bool pseudo_inverse_used = false;
};

// Core fit shared by MindReader (whole space) and Rui & Huang (per space).
MindReaderModel fit_affine_metric(const std::vector<std::span<const double>>& samples,
                                  std::span<const double> weights);

MindReaderModel mindreader_fit(const FeedbackSet& feedback, const Dataset& dataset);
double mindreader_score(std::span<const double> item, const MindReaderModel& model);

// Two-level scheme: per-space affine metrics combined by the optimal weight
// vector, which satisfies sum_c 1/w_c = 1.
struct RuiHuangModel {
  QueryPoint query;
  std::vector<MindReaderModel> spaces;
  std::vector<double> weights;
  std::vector<bool> degenerate;  // spaces where a^c hit the floor
};

RuiHuangModel rui_huang_fit(const FeedbackSet& feedback, const Dataset& dataset);
double rui_huang_score(std::span<const double> item_flat, const FeatureSchema& schema,
                       const RuiHuangModel& model);

// w_c = (1/sqrt(a_c)) * sum_j sqrt(a_j); zero entries are floored first.
std::vector<double> optimal_space_weights(std::span<const double> a,
                                          std::vector<bool>* degenerate = nullptr);

// Ids sorted by ascending score, ties broken by ascending id.
std::vector<std::string> rank(const Dataset& dataset, std::span<const double> scores,
                              int top_q);

}  // namespace rflab
