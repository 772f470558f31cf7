#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rflab/feature_store.hpp"

namespace rflab {

// A relevance feedback scheme as seen by the harness: fit on the feedback
// set, then score every universe row (lower = better). Implementations live
// in methods.cpp; stochastic scorers draw from the supplied seed.
class Method {
 public:
  explicit Method(std::string name) : name_(std::move(name)) {}
  virtual ~Method() = default;
  const std::string& name() const { return name_; }
  virtual std::vector<double> score_universe(const Dataset& dataset,
                                             std::span<const int> universe,
                                             const FeedbackSet& feedback,
                                             uint64_t seed) const = 0;

 private:
  std::string name_;
};

// One cell of the experimental grid.
struct Treatment {
  double kbar = 1.0;   // target mean hits under random selection
  int r = 0;           // feedback size
  int q = 0;           // result size
  int repetitions = 0;
  int m = 0;           // target category size
  int db = 0;          // universe size, round(q*m/kbar)
};

int derive_db(double kbar, int q, int m);

// All m items of the target category plus db-m items sampled uniformly
// without replacement from the rest; returns dataset row indices.
std::vector<int> build_trial_universe(const Dataset& dataset,
                                      const std::string& target_category, int db,
                                      uint64_t seed);

// Exact product-form pmf, evaluated in the log domain; out-of-range k gives 0.
double hypergeom_pmf(int k, int N, int m, int q);
// Exactly q*m/N.
double hypergeom_mean(int N, int m, int q);
// Exact null variance sum (k - kbar)^2 pmf(k).
double hypergeom_variance(int N, int m, int q);

struct BaselineTest {
  double p_value = 1.0;
  bool significant = false;
  double sample_mean = 0.0;
  double null_mean = 0.0;
  double null_variance = 0.0;
};

// One-sided z-test of the sample mean against the exact hypergeometric null.
BaselineTest random_baseline_test(std::span<const int> hits, int N, int m, int q,
                                  double significance);

struct SignTest {
  double p_value = 1.0;
  int direction = 0;  // +1: A wins more, -1: B wins more
  bool significant = false;
  bool incomparable = false;  // every pair tied
  int wins_a = 0;
  int wins_b = 0;
};

// Two-sided paired sign test; ties are dropped.
SignTest sign_test(std::span<const std::pair<int, int>> paired, double significance);

// One feedback trial: draw r feedback items from the target, fit, rank the
// universe, count hits in the top q. Feedback items stay in the scored
// universe unless exclude_feedback is set.
int run_trial(const Dataset& dataset, std::span<const int> universe,
              std::span<const int> target, const Method& method, int r, int q,
              uint64_t seed, bool exclude_feedback = false);

// Same trial executed for several methods with identical universe and
// feedback, enabling the paired sign test. A method whose fit fails yields
// nullopt for that repetition.
std::vector<std::optional<int>> run_trial_group(const Dataset& dataset,
                                                std::span<const int> universe,
                                                std::span<const int> target,
                                                std::span<const Method* const> methods,
                                                int r, int q, uint64_t seed,
                                                bool exclude_feedback = false);

struct TreatmentResult {
  std::string method;
  Treatment treatment;
  std::vector<int> hits;  // successful repetitions only
  int fit_failures = 0;
  double mean = 0.0;
  double variance = 0.0;
  double p_vs_random = 1.0;
  bool significant = false;
};

struct PairwiseEntry {
  Treatment treatment;
  std::string method_a;
  std::string method_b;
  double mean_diff = 0.0;  // mean(A) - mean(B)
  SignTest test;
  int pairs_used = 0;
};

struct BenchmarkConfig {
  std::vector<double> kbars{10.0, 5.0, 1.0, 0.5, 0.1};
  std::vector<int> rs{2, 5, 10, 20, 30};
  int q = 20;
  int repetitions = 20;
  uint64_t seed = 0;
  double significance = 0.01;
  bool exclude_feedback = false;
  int threads = 0;  // 0: RF_LAB_THREADS env, then hardware concurrency
};

struct Report {
  BenchmarkConfig config;
  int dataset_size = 0;
  int category_size = 0;  // m
  std::vector<std::string> methods;
  std::vector<TreatmentResult> rows;
  std::vector<PairwiseEntry> pairwise;
};

// Full treatment grid; within one repetition every method sees the same
// target set, universe, and feedback draw. Repetitions run in parallel with
// per-(treatment, repetition) derived seeds; output is independent of the
// thread count.
Report run_benchmark(const Dataset& dataset, std::span<const Method* const> methods,
                     const BenchmarkConfig& config);

void write_report_csv(const Report& report, std::ostream& out);
void write_report_table(const Report& report, std::ostream& out);
void write_pairwise_csv(const Report& report, std::ostream& out);

}  // namespace rflab
