#include "rflab/kernels.hpp"

#include <cmath>
#include <cstdlib>

namespace rflab::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += w[i] * d * d;
  }
  return acc;
}

double manhattan_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

}  // namespace scalar

namespace {

using BinaryFn = double (*)(const double*, const double*, std::size_t);
using TernaryFn = double (*)(const double*, const double*, const double*, std::size_t);

struct KernelTable {
  BinaryFn dot;
  BinaryFn squared_distance;
  TernaryFn weighted_squared_distance;
  BinaryFn manhattan_distance;
  std::string_view name;
};

KernelTable pick_table() {
#if defined(RFLAB_HAVE_AVX2)
  const char* env = std::getenv("RF_LAB_SIMD");
  const bool forced_off = env != nullptr && std::string_view(env) == "off";
  if (!forced_off && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return {avx2::dot, avx2::squared_distance, avx2::weighted_squared_distance,
            avx2::manhattan_distance, "avx2"};
  }
#endif
  return {scalar::dot, scalar::squared_distance, scalar::weighted_squared_distance,
          scalar::manhattan_distance, "scalar"};
}

const KernelTable& table() {
  static const KernelTable t = pick_table();
  return t;
}

}  // namespace

std::string_view active_set() { return table().name; }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().squared_distance(a.data(), b.data(), a.size());
}

double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w) {
  assert(a.size() == b.size() && a.size() == w.size());
  return table().weighted_squared_distance(a.data(), b.data(), w.data(), a.size());
}

double manhattan_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table().manhattan_distance(a.data(), b.data(), a.size());
}

}  // namespace rflab::kernels
