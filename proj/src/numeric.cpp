#include "rflab/numeric.hpp"

#include "rflab/kernels.hpp"

namespace rflab {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t mix_seed(uint64_t seed, uint64_t salt_a, uint64_t salt_b) {
  return splitmix64(splitmix64(seed ^ splitmix64(salt_a)) ^ splitmix64(~salt_b));
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double sym_quadratic_form(const Matrix& m, std::span<const double> d) {
  double acc = 0.0;
  for (int i = 0; i < m.rows; ++i) acc += d[i] * kernels::dot(m.row(i), d);
  return std::max(acc, 0.0);
}

}  // namespace rflab
