#include "rflab/latent_feedback.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rflab/errors.hpp"
#include "rflab/kernels.hpp"

namespace rflab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCollapseMass = 1e-12;

void check_shapes(const Matrix& obs, const LatentModel& model) {
  if (model.topics < 1) throw std::invalid_argument("latent model needs at least 1 topic");
  if (obs.cols != model.total_dim()) {
    throw std::invalid_argument("observation dimension does not match the latent model");
  }
  if (model.p_item_given_topic.rows != obs.rows ||
      model.p_item_given_topic.cols != model.topics) {
    throw std::invalid_argument("item-probability table does not match N x K");
  }
}

// log pi_b + log P(d_a|z_b) + sum_c log N(w_ac; mu_bc, var_bc), flat over the
// concatenated word dimensions.
void fill_log_joint(const Matrix& obs, const LatentModel& model, Matrix& log_t) {
  const int n = obs.rows;
  const int k = model.topics;
  const int total = obs.cols;

  std::vector<double> log_pi(k);
  std::vector<double> log_norm(k, 0.0);
  Matrix inv_var(k, total);
  for (int b = 0; b < k; ++b) {
    log_pi[b] = model.pi[b] > 0.0 ? std::log(model.pi[b]) : -kInf;
    for (int d = 0; d < total; ++d) {
      const double v = model.var.at(b, d);
      log_norm[b] += kLog2Pi + std::log(v);
      inv_var.at(b, d) = 1.0 / v;
    }
  }
  for (int a = 0; a < n; ++a) {
    const auto w = obs.row(a);
    for (int b = 0; b < k; ++b) {
      const double p_item = model.p_item_given_topic.at(a, b);
      const double quad = kernels::weighted_squared_distance(w, model.mu.row(b), inv_var.row(b));
      log_t.at(a, b) = log_pi[b] + (p_item > 0.0 ? std::log(p_item) : -kInf) -
                       0.5 * (log_norm[b] + quad);
    }
  }
}

}  // namespace

int LatentModel::total_dim() const {
  int t = 0;
  for (int d : word_dims) t += d;
  return t;
}

EStepResult e_step(const Matrix& observations, const LatentModel& model) {
  check_shapes(observations, model);
  const int n = observations.rows;
  const int k = model.topics;

  Matrix log_t(n, k);
  fill_log_joint(observations, model, log_t);

  EStepResult out;
  out.gamma = Matrix(n, k);
  out.topic_mass.assign(k, 0.0);
  for (int a = 0; a < n; ++a) {
    double m = -kInf;
    for (int b = 0; b < k; ++b) m = std::max(m, log_t.at(a, b));
    if (!(m > -kInf)) {
      throw NumericError("numeric degeneracy: zero joint density at observation " +
                         std::to_string(a));
    }
    double z = 0.0;
    for (int b = 0; b < k; ++b) z += std::exp(log_t.at(a, b) - m);
    for (int b = 0; b < k; ++b) {
      const double g = std::exp(log_t.at(a, b) - m) / z;
      out.gamma.at(a, b) = g;
      out.topic_mass[b] += g;
    }
    out.log_likelihood += m + std::log(z);
  }
  return out;
}

int m_step(const Matrix& observations, const Matrix& gamma,
           std::span<const double> topic_mass, LatentModel& model, double var_floor,
           std::mt19937_64& reseed_rng) {
  const int n = observations.rows;
  const int k = model.topics;
  const int total = observations.cols;
  if (gamma.rows != n || gamma.cols != k || static_cast<int>(topic_mass.size()) != k) {
    throw std::invalid_argument("m_step shape mismatch");
  }

  // Population variance of the whole observation set, used when a collapsed
  // topic has to be re-seeded.
  auto global_variance = [&]() {
    std::vector<double> mean(total, 0.0);
    std::vector<double> var(total, 0.0);
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      for (int d = 0; d < total; ++d) mean[d] += w[d];
    }
    for (double& v : mean) v /= n;
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      for (int d = 0; d < total; ++d) {
        const double diff = w[d] - mean[d];
        var[d] += diff * diff;
      }
    }
    for (double& v : var) v = std::max(v / n, var_floor);
    return var;
  };

  int collapsed = 0;
  for (int b = 0; b < k; ++b) {
    if (topic_mass[b] < kCollapseMass) {
      ++collapsed;
      std::uniform_int_distribution<int> pick(0, n - 1);
      const auto seed_row = observations.row(pick(reseed_rng));
      const std::vector<double> gvar = global_variance();
      for (int d = 0; d < total; ++d) {
        model.mu.at(b, d) = seed_row[d];
        model.var.at(b, d) = gvar[d];
      }
      for (int a = 0; a < n; ++a) model.p_item_given_topic.at(a, b) = 1.0 / n;
      model.pi[b] = 1.0 / n;
      continue;
    }
    const double mass = topic_mass[b];
    model.pi[b] = mass / n;
    for (int a = 0; a < n; ++a) model.p_item_given_topic.at(a, b) = gamma.at(a, b) / mass;
    for (int d = 0; d < total; ++d) model.mu.at(b, d) = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      const double g = gamma.at(a, b);
      for (int d = 0; d < total; ++d) model.mu.at(b, d) += g * w[d];
    }
    for (int d = 0; d < total; ++d) model.mu.at(b, d) /= mass;
    for (int d = 0; d < total; ++d) model.var.at(b, d) = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      const double g = gamma.at(a, b);
      for (int d = 0; d < total; ++d) {
        const double diff = w[d] - model.mu.at(b, d);
        model.var.at(b, d) += g * diff * diff;
      }
    }
    for (int d = 0; d < total; ++d) {
      model.var.at(b, d) = std::max(model.var.at(b, d) / mass, var_floor);
    }
  }
  // Re-seeded topics received a placeholder prior of 1/N.
  const double pi_sum = std::accumulate(model.pi.begin(), model.pi.end(), 0.0);
  for (double& p : model.pi) p /= pi_sum;
  return collapsed;
}

double log_likelihood(const Matrix& observations, const LatentModel& model) {
  check_shapes(observations, model);
  Matrix log_t(observations.rows, model.topics);
  fill_log_joint(observations, model, log_t);
  double total = 0.0;
  for (int a = 0; a < observations.rows; ++a) {
    double m = -kInf;
    for (int b = 0; b < model.topics; ++b) m = std::max(m, log_t.at(a, b));
    if (!(m > -kInf)) {
      throw NumericError("numeric degeneracy: zero joint density at observation " +
                         std::to_string(a));
    }
    double z = 0.0;
    for (int b = 0; b < model.topics; ++b) z += std::exp(log_t.at(a, b) - m);
    total += m + std::log(z);
  }
  return total;
}

EmResult em_fit(const Matrix& observations, const std::vector<int>& word_dims,
                const EmConfig& config, double score_alpha) {
  const int n = observations.rows;
  const int k = config.topics;
  if (n < 1) throw std::invalid_argument("em_fit needs at least 1 observation");
  if (k < 1) throw std::invalid_argument("em_fit needs at least 1 topic");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("em tolerance must be > 0");
  if (config.max_iterations < 1) throw std::invalid_argument("em needs >= 1 iteration");
  if (config.restarts < 1) throw std::invalid_argument("em needs >= 1 restart");
  int total = 0;
  for (int d : word_dims) total += d;
  if (total != observations.cols) {
    throw std::invalid_argument("word_dims do not match observation width");
  }
  if (n < k) {
    std::cerr << "em_fit: only " << n << " observations for " << k << " topics\n";
  }

  double var_floor = config.variance_floor;
  if (!(var_floor > 0.0)) {
    double mean_sq = 0.0;
    std::vector<double> mean(total, 0.0);
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      for (int d = 0; d < total; ++d) mean[d] += w[d];
    }
    for (double& v : mean) v /= n;
    for (int a = 0; a < n; ++a) {
      const auto w = observations.row(a);
      for (int d = 0; d < total; ++d) {
        const double diff = w[d] - mean[d];
        mean_sq += diff * diff;
      }
    }
    var_floor = variance_floor(mean_sq / (static_cast<double>(n) * total));
  }

  EmResult best;
  bool have_best = false;
  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 rng(mix_seed(config.seed, 0xE3, restart));

    LatentModel model;
    model.topics = k;
    model.word_dims = word_dims;
    model.pi.assign(k, 0.0);
    model.p_item_given_topic = Matrix(n, k);
    model.mu = Matrix(k, total);
    model.var = Matrix(k, total);

    // Random hard assignment, smoothed toward uniform; the modulo walk over a
    // shuffled order covers every topic whenever N >= K. The smoothing is
    // load-bearing: an exact zero in the initial responsibilities propagates
    // into P(d|z) and is absorbing through the discrete update, freezing the
    // partition at its random seed.
    const double kSmoothing = 0.5;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix gamma(n, k, kSmoothing / k);
    std::vector<double> mass(k, kSmoothing * n / k);
    for (int i = 0; i < n; ++i) {
      const int b = i % k;
      gamma.at(order[i], b) += 1.0 - kSmoothing;
      mass[b] += 1.0 - kSmoothing;
    }
    int collapsed = m_step(observations, gamma, mass, model, var_floor, rng);

    std::vector<double> trace;
    trace.reserve(config.max_iterations);
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      EStepResult e = e_step(observations, model);
      trace.push_back(e.log_likelihood);
      if (trace.size() >= 2 &&
          std::fabs(trace[trace.size() - 1] - trace[trace.size() - 2]) < config.tolerance) {
        break;
      }
      collapsed += m_step(observations, e.gamma, e.topic_mass, model, var_floor, rng);
    }

    if (!have_best || trace.back() > best.likelihood_trace.back()) {
      best.model = std::move(model);
      best.likelihood_trace = std::move(trace);
      best.collapsed_topics = collapsed;
      have_best = true;
    }
  }
  best.model.alpha = score_alpha;
  best.model.xi_table = build_xi_table(score_alpha);
  return best;
}

double latent_distance(std::span<const double> row, const LatentModel& model) {
  if (static_cast<int>(row.size()) != model.total_dim()) {
    throw std::invalid_argument("latent_distance dimension mismatch");
  }
  // Word spaces are orthogonal, so the squared per-word distances add; the
  // flat sum below equals sum_c D_bc^2.
  const double inv_root = 1.0 / std::sqrt(1.0 - model.alpha);
  double dist = 0.0;
  for (int b = 0; b < model.topics; ++b) {
    double d2 = 0.0;
    for (size_t d = 0; d < row.size(); ++d) {
      const double sigma = std::sqrt(model.var.at(b, static_cast<int>(d)));
      const double t =
          sigma * inv_root * xi((row[d] - model.mu.at(b, static_cast<int>(d))) / sigma,
                                model.xi_table);
      d2 += t * t;
    }
    dist += model.pi[b] * std::sqrt(d2);
  }
  return dist;
}

void write_latent_model(const LatentModel& model, std::ostream& out) {
  char buf[40];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "# latent model: K = " << model.topics << ", alpha = " << model.alpha << "\n";
  out << "# word dims:";
  for (int d : model.word_dims) out << ' ' << d;
  out << "\n";
  for (int b = 0; b < model.topics; ++b) {
    out << "topic " << b << " pi " << fmt(model.pi[b]) << "\n";
    int offset = 0;
    for (size_t c = 0; c < model.word_dims.size(); ++c) {
      out << "topic " << b << " word " << (c + 1) << " mu";
      for (int d = 0; d < model.word_dims[c]; ++d) out << ' ' << fmt(model.mu.at(b, offset + d));
      out << "\n";
      out << "topic " << b << " word " << (c + 1) << " var";
      for (int d = 0; d < model.word_dims[c]; ++d) out << ' ' << fmt(model.var.at(b, offset + d));
      out << "\n";
      offset += model.word_dims[c];
    }
  }
}

}  // namespace rflab
