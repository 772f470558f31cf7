#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rflab/numeric.hpp"
#include "rflab/riemann_feedback.hpp"

namespace rflab {

// K binary topics; each topic carries one diagonal Gaussian per word space
// plus a discrete distribution over the observed item identities. Word
// vectors are stored flat (word c occupies word_dims[c] consecutive entries).
struct LatentModel {
  int topics = 0;
  std::vector<int> word_dims;
  std::vector<double> pi;      // topic priors, sums to 1
  Matrix p_item_given_topic;   // N x K, each column sums to 1
  Matrix mu;                   // K x total_dim
  Matrix var;                  // K x total_dim, floored
  double alpha = 0.5;          // geodesic deformation used at scoring time
  XiTable xi_table;

  int total_dim() const;
};

struct EmConfig {
  int topics = 3;
  int max_iterations = 200;
  double tolerance = 1e-6;
  uint64_t seed = 0;
  double variance_floor = 0.0;  // <= 0 selects the data-scale floor
  int restarts = 1;
};

struct EStepResult {
  Matrix gamma;                    // N x K responsibilities, rows sum to 1
  std::vector<double> topic_mass;  // N_b = sum_a gamma_ab
  double log_likelihood = 0.0;
};

// Responsibilities in the log domain with per-row max shifting.
EStepResult e_step(const Matrix& observations, const LatentModel& model);

// Closed-form parameter updates; a topic whose mass vanishes is re-seeded
// from a random observation. Returns the number of re-seeded topics.
int m_step(const Matrix& observations, const Matrix& gamma,
           std::span<const double> topic_mass, LatentModel& model, double var_floor,
           std::mt19937_64& reseed_rng);

double log_likelihood(const Matrix& observations, const LatentModel& model);

struct EmResult {
  LatentModel model;
  std::vector<double> likelihood_trace;
  int collapsed_topics = 0;
};

// Best of `restarts` seeded runs by final log-likelihood.
EmResult em_fit(const Matrix& observations, const std::vector<int>& word_dims,
                const EmConfig& config, double score_alpha = 0.5);

// Aspect-averaged geodesic distance D(w) = sum_b pi_b * D_b(w).
double latent_distance(std::span<const double> row, const LatentModel& model);

// Text dump of pi, mu, var per topic for inspection and golden tests.
void write_latent_model(const LatentModel& model, std::ostream& out);

}  // namespace rflab
