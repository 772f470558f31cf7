#include "rflab/methods.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "rflab/kernels.hpp"
#include "rflab/riemann_feedback.hpp"

namespace rflab {

namespace {

// Per-space Rocchio on the positives alone; a trial carries no prior query,
// so this is how every method builds one.
QueryPoint positives_query(const Dataset& dataset, const FeedbackSet& feedback) {
  FeedbackSet positives_only;
  positives_only.positives = feedback.positives;
  const QueryPoint zeros = QueryPoint::zeros(dataset.schema());
  return rocchio_update(zeros, zeros, positives_only, dataset, {0.0, 1.0, 0.0});
}

Matrix positive_query_rows(const Dataset& dataset, const FeedbackSet& feedback,
                           const QueryPoint& query, const MethodParams& params,
                           bool log_space) {
  std::vector<int> rows;
  rows.reserve(feedback.positives.size());
  for (const auto& [id, w] : feedback.positives) rows.push_back(dataset.index_of(id));
  QuerySpaceMatrix q = build_query_space(dataset, rows, query, params.per_space_metric);
  if (log_space) q = log_transform(q, params.epsilon);
  return std::move(q.coords);
}

class RocchioMethod final : public Method {
 public:
  explicit RocchioMethod(const MethodParams&) : Method("rocchio") {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const std::vector<double> q = positives_query(dataset, feedback).flat();
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = kernels::squared_distance(dataset.row(universe[i]), q);
    }
    return scores;
  }
};

class MarsMethod final : public Method {
 public:
  explicit MarsMethod(const MethodParams&) : Method("mars") {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const MarsModel model = mars_fit(feedback, dataset);
    const std::vector<double> q = positives_query(dataset, feedback).flat();
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = mars_score(dataset.row(universe[i]), q, model);
    }
    return scores;
  }
};

class MindReaderMethod final : public Method {
 public:
  explicit MindReaderMethod(const MethodParams&) : Method("mindreader") {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const MindReaderModel model = mindreader_fit(feedback, dataset);
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = mindreader_score(dataset.row(universe[i]), model);
    }
    return scores;
  }
};

class RuiHuangMethod final : public Method {
 public:
  explicit RuiHuangMethod(const MethodParams&) : Method("rui-huang") {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const RuiHuangModel model = rui_huang_fit(feedback, dataset);
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = rui_huang_score(dataset.row(universe[i]), dataset.schema(), model);
    }
    return scores;
  }
};

// MARS variance weighting applied to the W-dimensional query space; the query
// is the origin there.
class MarsQMethod final : public Method {
 public:
  explicit MarsQMethod(const MethodParams& params) : Method("mars-q"), params_(params) {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const QueryPoint query = positives_query(dataset, feedback);
    const Matrix positives =
        positive_query_rows(dataset, feedback, query, params_, /*log_space=*/false);
    const MarsModel model = mars_fit_rows(positives);
    const QuerySpaceMatrix space =
        build_query_space(dataset, universe, query, params_.per_space_metric);
    const std::vector<double> origin(space.word_count(), 0.0);
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = mars_score(space.row(static_cast<int>(i)), origin, model);
    }
    return scores;
  }

 private:
  MethodParams params_;
};

class RiemannMethod final : public Method {
 public:
  explicit RiemannMethod(const MethodParams& params) : Method("riemann"), params_(params) {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t /*seed*/) const override {
    const QueryPoint query = positives_query(dataset, feedback);
    const Matrix positives =
        positive_query_rows(dataset, feedback, query, params_, params_.log_transform);
    const RiemannModel model = fit_riemann(positives, params_.alpha);
    QuerySpaceMatrix space =
        build_query_space(dataset, universe, query, params_.per_space_metric);
    if (params_.log_transform) space = log_transform(space, params_.epsilon);
    return riemann_score(space, model);
  }

 private:
  MethodParams params_;
};

class LatentMethod final : public Method {
 public:
  explicit LatentMethod(const MethodParams& params) : Method("latent"), params_(params) {}

  std::vector<double> score_universe(const Dataset& dataset, std::span<const int> universe,
                                     const FeedbackSet& feedback,
                                     uint64_t seed) const override {
    const QueryPoint query = positives_query(dataset, feedback);
    const Matrix positives =
        positive_query_rows(dataset, feedback, query, params_, params_.log_transform);

    EmConfig em = params_.em;
    // Each query-space coordinate acts as a 1-D word.
    const std::vector<int> word_dims(positives.cols, 1);
    em.topics = std::min(params_.topics, positives.rows);
    em.seed = seed;
    const EmResult fit = em_fit(positives, word_dims, em, params_.alpha);

    QuerySpaceMatrix space =
        build_query_space(dataset, universe, query, params_.per_space_metric);
    if (params_.log_transform) space = log_transform(space, params_.epsilon);
    std::vector<double> scores(universe.size());
    for (size_t i = 0; i < universe.size(); ++i) {
      scores[i] = latent_distance(space.row(static_cast<int>(i)), fit.model);
    }
    return scores;
  }

 private:
  MethodParams params_;
};

class RandomMethod final : public Method {
 public:
  explicit RandomMethod(const MethodParams&) : Method("random") {}

  std::vector<double> score_universe(const Dataset&, std::span<const int> universe,
                                     const FeedbackSet&, uint64_t seed) const override {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> scores(universe.size());
    for (double& s : scores) s = u(rng);
    return scores;
  }
};

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"rocchio",  "mars",   "mindreader",
                                              "rui-huang", "mars-q", "riemann",
                                              "latent",    "random"};
  return names;
}

const std::vector<std::string>& default_benchmark_methods() {
  static const std::vector<std::string> names{"rocchio", "mars",    "rui-huang",
                                              "mars-q",  "riemann", "latent"};
  return names;
}

std::unique_ptr<Method> make_method(const std::string& name, const MethodParams& params) {
  if (name == "rocchio") return std::make_unique<RocchioMethod>(params);
  if (name == "mars") return std::make_unique<MarsMethod>(params);
  if (name == "mindreader") return std::make_unique<MindReaderMethod>(params);
  if (name == "rui-huang") return std::make_unique<RuiHuangMethod>(params);
  if (name == "mars-q") return std::make_unique<MarsQMethod>(params);
  if (name == "riemann") return std::make_unique<RiemannMethod>(params);
  if (name == "latent") return std::make_unique<LatentMethod>(params);
  if (name == "random") return std::make_unique<RandomMethod>(params);
  std::string valid;
  for (const auto& n : method_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown method '" + name + "' (valid: " + valid + ")");
}

std::vector<std::unique_ptr<Method>> make_methods(const std::vector<std::string>& names,
                                                  const MethodParams& params) {
  std::vector<std::unique_ptr<Method>> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(make_method(name, params));
  return out;
}

}  // namespace rflab
