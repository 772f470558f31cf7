#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rflab/classic_feedback.hpp"
#include "rflab/eval_harness.hpp"
#include "rflab/latent_feedback.hpp"
#include "rflab/query_space.hpp"

namespace rflab {

// Knobs shared by the built-in methods. Per-trial queries are built from the
// positives alone (per-space Rocchio without negatives); Rocchio itself never
// operates inside the query space, which cannot exist without it.
struct MethodParams {
  double alpha = 0.5;          // riemann/latent deformation
  int topics = 3;              // latent K
  double epsilon = 1e-6;       // log-transform offset
  bool log_transform = true;   // riemann/latent work in the transformed space
  PerSpaceMetric per_space_metric = PerSpaceMetric::kEuclidean;
  EmConfig em{};               // topics and seed are overridden per trial
};

// rocchio, mars, mindreader, rui-huang, mars-q, riemann, latent, random.
const std::vector<std::string>& method_names();

// The six schemes of the standard comparison grid.
const std::vector<std::string>& default_benchmark_methods();

// Throws std::invalid_argument listing the valid names.
std::unique_ptr<Method> make_method(const std::string& name, const MethodParams& params = {});

std::vector<std::unique_ptr<Method>> make_methods(const std::vector<std::string>& names,
                                                  const MethodParams& params = {});

}  // namespace rflab
