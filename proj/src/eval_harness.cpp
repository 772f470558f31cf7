#include "rflab/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "rflab/errors.hpp"
#include "rflab/numeric.hpp"

namespace rflab {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  if (std::isnan(v)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// First `count` elements of a seeded partial Fisher-Yates shuffle.
std::vector<int> sample_without_replacement(std::vector<int> pool, int count,
                                            std::mt19937_64& rng) {
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

struct TrialSetup {
  FeedbackSet feedback;
  std::vector<int> feedback_rows;
  std::vector<int> scored_universe;
};

TrialSetup prepare_trial(const Dataset& dataset, std::span<const int> universe,
                         std::span<const int> target, int r, int q, uint64_t seed,
                         bool exclude_feedback) {
  const int m = static_cast<int>(target.size());
  if (r < 1 || r > m) throw std::invalid_argument("trial needs 1 <= r <= m");
  if (q < 1 || q > m) throw std::invalid_argument("trial needs 1 <= q <= m");

  std::mt19937_64 rng(mix_seed(seed, 0xFEED));
  TrialSetup setup;
  setup.feedback_rows =
      sample_without_replacement(std::vector<int>(target.begin(), target.end()), r, rng);
  for (int row : setup.feedback_rows) {
    setup.feedback.positives.emplace_back(dataset.id(row), 1.0);
  }
  if (exclude_feedback) {
    std::vector<char> is_feedback(dataset.size(), 0);
    for (int row : setup.feedback_rows) is_feedback[row] = 1;
    for (int row : universe) {
      if (!is_feedback[row]) setup.scored_universe.push_back(row);
    }
  } else {
    setup.scored_universe.assign(universe.begin(), universe.end());
  }
  return setup;
}

int count_hits(const Dataset& dataset, std::span<const int> universe,
               std::span<const double> scores, std::span<const int> target, int q) {
  std::vector<int> order(universe.size());
  std::iota(order.begin(), order.end(), 0);
  const int keep = std::min<int>(q, static_cast<int>(universe.size()));
  std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int lhs, int rhs) {
    if (scores[lhs] != scores[rhs]) return scores[lhs] < scores[rhs];
    return dataset.id(universe[lhs]) < dataset.id(universe[rhs]);
  });
  std::vector<char> in_target(dataset.size(), 0);
  for (int row : target) in_target[row] = 1;
  int hits = 0;
  for (int i = 0; i < keep; ++i) hits += in_target[universe[order[i]]];
  return hits;
}

int env_threads() {
  const char* env = std::getenv("RF_LAB_THREADS");
  if (env == nullptr) return 0;
  return std::atoi(env);
}

double population_variance(std::span<const int> values, double mean) {
  double acc = 0.0;
  for (int v : values) acc += (v - mean) * (v - mean);
  return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

}  // namespace

int derive_db(double kbar, int q, int m) {
  if (!(kbar > 0.0)) throw std::invalid_argument("kbar must be > 0");
  return static_cast<int>(std::llround(static_cast<double>(q) * m / kbar));
}

std::vector<int> build_trial_universe(const Dataset& dataset,
                                      const std::string& target_category, int db,
                                      uint64_t seed) {
  std::vector<int> members;
  std::vector<int> others;
  for (int a = 0; a < dataset.size(); ++a) {
    (dataset.category(a) == target_category ? members : others).push_back(a);
  }
  if (members.empty()) throw DataError("no items in category '" + target_category + "'");
  const int m = static_cast<int>(members.size());
  if (db < m) throw std::invalid_argument("universe size smaller than the target category");
  if (db > dataset.size()) {
    throw DataError("dataset too small: need " + std::to_string(db) + " items, have " +
                    std::to_string(dataset.size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<int> universe = std::move(members);
  if (db > m) {
    const auto extra = sample_without_replacement(std::move(others), db - m, rng);
    universe.insert(universe.end(), extra.begin(), extra.end());
  }
  std::sort(universe.begin(), universe.end());
  return universe;
}

double hypergeom_pmf(int k, int N, int m, int q) {
  if (N < 0 || m < 0 || q < 0 || m > N || q > N) {
    throw std::invalid_argument("hypergeom_pmf needs 0 <= m,q <= N");
  }
  const int p = N - m;
  if (k < std::max(0, q - p) || k > std::min(m, q)) return 0.0;
  double log_p = 0.0;
  for (int i = 1; i <= k; ++i) log_p += std::log(static_cast<double>(m + 1 - i) / i);
  for (int i = 1; i <= q - k; ++i) log_p += std::log(static_cast<double>(p + 1 - i) / i);
  for (int i = 1; i <= q; ++i) log_p -= std::log(static_cast<double>(N + 1 - i) / i);
  return std::exp(log_p);
}

double hypergeom_mean(int N, int m, int q) {
  if (N < 1 || m > N || q > N) throw std::invalid_argument("hypergeom_mean needs m,q <= N");
  return static_cast<double>(q) * m / N;
}

double hypergeom_variance(int N, int m, int q) {
  const double mean = hypergeom_mean(N, m, q);
  const int lo = std::max(0, q - (N - m));
  const int hi = std::min(m, q);
  double var = 0.0;
  for (int k = lo; k <= hi; ++k) {
    var += (k - mean) * (k - mean) * hypergeom_pmf(k, N, m, q);
  }
  return var;
}

BaselineTest random_baseline_test(std::span<const int> hits, int N, int m, int q,
                                  double significance) {
  if (hits.size() < 2) throw std::invalid_argument("insufficient repetitions (need >= 2)");
  BaselineTest out;
  out.null_mean = hypergeom_mean(N, m, q);
  out.null_variance = hypergeom_variance(N, m, q);
  out.sample_mean =
      std::accumulate(hits.begin(), hits.end(), 0.0) / static_cast<double>(hits.size());
  if (out.null_variance <= 0.0) {
    out.p_value = out.sample_mean > out.null_mean ? 0.0 : 1.0;
  } else {
    const double z = (out.sample_mean - out.null_mean) /
                     std::sqrt(out.null_variance / static_cast<double>(hits.size()));
    out.p_value = normal_upper_tail(z);
  }
  out.significant = out.p_value < significance;
  return out;
}

SignTest sign_test(std::span<const std::pair<int, int>> paired, double significance) {
  SignTest out;
  for (const auto& [a, b] : paired) {
    if (a > b) ++out.wins_a;
    if (b > a) ++out.wins_b;
  }
  const int n = out.wins_a + out.wins_b;
  if (n == 0) {
    out.incomparable = true;
    return out;
  }
  const int s = std::min(out.wins_a, out.wins_b);
  double tail;
  if (n <= 50) {
    // Binomials up to C(50,25) are exact in doubles.
    double binom = 1.0;
    double sum = 0.0;
    for (int i = 0; i <= s; ++i) {
      sum += binom;
      binom = binom * (n - i) / (i + 1);
    }
    tail = sum * std::ldexp(1.0, -n);
  } else {
    tail = 0.0;
    for (int i = 0; i <= s; ++i) {
      tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                       n * std::log(2.0));
    }
  }
  out.p_value = std::min(1.0, 2.0 * tail);
  out.direction = out.wins_a > out.wins_b ? 1 : out.wins_a < out.wins_b ? -1 : 0;
  out.significant = out.p_value < significance;
  return out;
}

std::vector<std::optional<int>> run_trial_group(const Dataset& dataset,
                                                std::span<const int> universe,
                                                std::span<const int> target,
                                                std::span<const Method* const> methods,
                                                int r, int q, uint64_t seed,
                                                bool exclude_feedback) {
  const TrialSetup setup =
      prepare_trial(dataset, universe, target, r, q, seed, exclude_feedback);
  std::vector<std::optional<int>> hits(methods.size());
  for (size_t i = 0; i < methods.size(); ++i) {
    try {
      const std::vector<double> scores = methods[i]->score_universe(
          dataset, setup.scored_universe, setup.feedback, mix_seed(seed, 0x5C0, i));
      hits[i] = count_hits(dataset, setup.scored_universe, scores, target, q);
    } catch (const std::exception&) {
      hits[i] = std::nullopt;
    }
  }
  return hits;
}

int run_trial(const Dataset& dataset, std::span<const int> universe,
              std::span<const int> target, const Method& method, int r, int q,
              uint64_t seed, bool exclude_feedback) {
  const TrialSetup setup =
      prepare_trial(dataset, universe, target, r, q, seed, exclude_feedback);
  try {
    const std::vector<double> scores = method.score_universe(
        dataset, setup.scored_universe, setup.feedback, mix_seed(seed, 0x5C0, 0));
    return count_hits(dataset, setup.scored_universe, scores, target, q);
  } catch (const std::exception& e) {
    throw NumericError("method '" + method.name() + "' failed (r=" + std::to_string(r) +
                       ", q=" + std::to_string(q) + "): " + e.what());
  }
}

Report run_benchmark(const Dataset& dataset, std::span<const Method* const> methods,
                     const BenchmarkConfig& config) {
  if (methods.empty()) throw std::invalid_argument("benchmark needs at least one method");
  if (config.repetitions < 1) throw std::invalid_argument("benchmark needs >= 1 repetition");

  const auto categories = dataset.by_category();
  if (categories.empty()) throw DataError("dataset has no categories");
  const int m = static_cast<int>(categories.begin()->second.size());
  std::vector<std::string> category_names;
  for (const auto& [name, rows] : categories) {
    if (static_cast<int>(rows.size()) != m) {
      throw DataError("benchmark requires uniform category sizes; '" + name + "' has " +
                      std::to_string(rows.size()) + " items, expected " + std::to_string(m));
    }
    category_names.push_back(name);
  }

  Report report;
  report.config = config;
  report.dataset_size = dataset.size();
  report.category_size = m;
  for (const Method* method : methods) report.methods.push_back(method->name());

  std::vector<Treatment> treatments;
  for (double kbar : config.kbars) {
    for (int r : config.rs) {
      Treatment t;
      t.kbar = kbar;
      t.r = r;
      t.q = config.q;
      t.repetitions = config.repetitions;
      t.m = m;
      t.db = derive_db(kbar, config.q, m);
      if (t.r > m || t.q > m) {
        throw std::invalid_argument("treatment r and q must not exceed the category size");
      }
      if (t.db < m || t.db > dataset.size()) {
        throw DataError("treatment kbar=" + fmt(kbar) + " needs a universe of " +
                        std::to_string(t.db) + " items; dataset has " +
                        std::to_string(dataset.size()));
      }
      treatments.push_back(t);
    }
  }

  // One target category per repetition, shared by every treatment; drawn
  // without replacement while enough categories exist.
  std::mt19937_64 cat_rng(mix_seed(config.seed, 0xCA7));
  std::vector<std::string> rep_category(config.repetitions);
  if (config.repetitions <= static_cast<int>(category_names.size())) {
    std::vector<int> idx(category_names.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), cat_rng);
    for (int rep = 0; rep < config.repetitions; ++rep) {
      rep_category[rep] = category_names[idx[rep]];
    }
  } else {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(category_names.size()) - 1);
    for (int rep = 0; rep < config.repetitions; ++rep) {
      rep_category[rep] = category_names[pick(cat_rng)];
    }
  }

  std::vector<std::vector<int>> rep_members(config.repetitions);
  for (int rep = 0; rep < config.repetitions; ++rep) {
    rep_members[rep] = categories.at(rep_category[rep]);
  }

  struct Task {
    int treatment;
    int rep;
  };
  std::vector<Task> tasks;
  for (size_t t = 0; t < treatments.size(); ++t) {
    for (int rep = 0; rep < config.repetitions; ++rep) {
      tasks.push_back({static_cast<int>(t), rep});
    }
  }
  // grid[t][rep][method]
  std::vector<std::vector<std::vector<std::optional<int>>>> grid(
      treatments.size(),
      std::vector<std::vector<std::optional<int>>>(config.repetitions));

  int threads = config.threads > 0 ? config.threads : env_threads();
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<int>(threads, 1, static_cast<int>(tasks.size()));

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      if (failed.load()) return;
      const Task task = tasks[i];
      const Treatment& t = treatments[task.treatment];
      try {
        const uint64_t trial_seed =
            mix_seed(config.seed, static_cast<uint64_t>(task.treatment), task.rep);
        const std::vector<int> universe = build_trial_universe(
            dataset, rep_category[task.rep], t.db, mix_seed(trial_seed, 0x0217));
        grid[task.treatment][task.rep] =
            run_trial_group(dataset, universe, rep_members[task.rep], methods, t.r, t.q,
                            trial_seed, config.exclude_feedback);
      } catch (...) {
        std::scoped_lock lock(failure_mutex);
        if (failure == nullptr) failure = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure != nullptr) std::rethrow_exception(failure);

  for (size_t t = 0; t < treatments.size(); ++t) {
    for (size_t i = 0; i < methods.size(); ++i) {
      TreatmentResult row;
      row.method = methods[i]->name();
      row.treatment = treatments[t];
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const auto& h = grid[t][rep][i];
        if (h.has_value()) {
          row.hits.push_back(*h);
        } else {
          ++row.fit_failures;
        }
      }
      if (row.hits.empty()) {
        row.mean = std::numeric_limits<double>::quiet_NaN();
        row.variance = std::numeric_limits<double>::quiet_NaN();
        row.p_vs_random = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.mean = std::accumulate(row.hits.begin(), row.hits.end(), 0.0) /
                   static_cast<double>(row.hits.size());
        row.variance = population_variance(row.hits, row.mean);
        if (row.hits.size() >= 2) {
          const BaselineTest test = random_baseline_test(
              row.hits, treatments[t].db, treatments[t].m, treatments[t].q,
              config.significance);
          row.p_vs_random = test.p_value;
          row.significant = test.significant;
        }
      }
      report.rows.push_back(std::move(row));
    }
    for (size_t i = 0; i < methods.size(); ++i) {
      for (size_t j = 0; j < methods.size(); ++j) {
        if (i == j) continue;
        PairwiseEntry entry;
        entry.treatment = treatments[t];
        entry.method_a = methods[i]->name();
        entry.method_b = methods[j]->name();
        std::vector<std::pair<int, int>> paired;
        double sum_a = 0.0;
        double sum_b = 0.0;
        for (int rep = 0; rep < config.repetitions; ++rep) {
          const auto& ha = grid[t][rep][i];
          const auto& hb = grid[t][rep][j];
          if (ha.has_value() && hb.has_value()) {
            paired.emplace_back(*ha, *hb);
            sum_a += *ha;
            sum_b += *hb;
          }
        }
        entry.pairs_used = static_cast<int>(paired.size());
        entry.mean_diff = paired.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : (sum_a - sum_b) / static_cast<double>(paired.size());
        entry.test = sign_test(paired, config.significance);
        report.pairwise.push_back(std::move(entry));
      }
    }
  }
  return report;
}

namespace {

void write_config_header(const Report& report, std::ostream& out) {
  const BenchmarkConfig& c = report.config;
  out << "# methods =";
  for (const auto& m : report.methods) out << ' ' << m;
  out << "\n# kbar =";
  for (double k : c.kbars) out << ' ' << fmt(k);
  out << "\n# r =";
  for (int r : c.rs) out << ' ' << r;
  out << "\n# q = " << c.q << "\n# repetitions = " << c.repetitions
      << "\n# seed = " << c.seed << "\n# significance = " << fmt(c.significance)
      << "\n# exclude_feedback = " << (c.exclude_feedback ? "yes" : "no")
      << "\n# dataset_size = " << report.dataset_size
      << "\n# category_size = " << report.category_size << "\n";
}

}  // namespace

void write_report_csv(const Report& report, std::ostream& out) {
  write_config_header(report, out);
  out << "method,kbar,r,db,reps_ok,fit_failures,mean,variance,p_vs_random,significant\n";
  for (const auto& row : report.rows) {
    out << row.method << ',' << fmt(row.treatment.kbar) << ',' << row.treatment.r << ','
        << row.treatment.db << ',' << row.hits.size() << ',' << row.fit_failures << ','
        << fmt(row.mean) << ',' << fmt(row.variance) << ',' << fmt(row.p_vs_random) << ','
        << (row.significant ? 1 : 0) << "\n";
  }
}

void write_report_table(const Report& report, std::ostream& out) {
  write_config_header(report, out);
  out << "# cells: mean/variance, * = significantly better than random\n";
  for (const auto& method : report.methods) {
    out << "\n" << method << "\n";
    out << "  kbar\\r";
    for (int r : report.config.rs) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%14d", r);
      out << buf;
    }
    out << "\n";
    for (double kbar : report.config.kbars) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%8s", fmt(kbar).c_str());
      out << buf;
      for (int r : report.config.rs) {
        const TreatmentResult* cell = nullptr;
        for (const auto& row : report.rows) {
          if (row.method == method && row.treatment.kbar == kbar && row.treatment.r == r) {
            cell = &row;
            break;
          }
        }
        std::string text = "-";
        if (cell != nullptr && !cell->hits.empty()) {
          text = fmt(cell->mean, "%.2f") + "/" + fmt(cell->variance, "%.2f") +
                 (cell->significant ? "*" : "");
        }
        std::snprintf(buf, sizeof buf, "%14s", text.c_str());
        out << buf;
      }
      out << "\n";
    }
  }
}

void write_pairwise_csv(const Report& report, std::ostream& out) {
  write_config_header(report, out);
  out << "kbar,r,method_a,method_b,mean_diff,pairs,p_sign,significant,incomparable\n";
  for (const auto& e : report.pairwise) {
    out << fmt(e.treatment.kbar) << ',' << e.treatment.r << ',' << e.method_a << ','
        << e.method_b << ',' << fmt(e.mean_diff) << ',' << e.pairs_used << ','
        << fmt(e.test.p_value) << ',' << (e.test.significant ? 1 : 0) << ','
        << (e.test.incomparable ? 1 : 0) << "\n";
  }
}

}  // namespace rflab
