#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "rflab/kernels.hpp"
#include "rflab/numeric.hpp"

using namespace rflab;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, size_t n, double lo = -3.0,
                               double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels against naive expressions") {
  const std::vector<double> a{1.0, 2.0, -3.0};
  const std::vector<double> b{0.5, -1.0, 2.0};
  const std::vector<double> w{2.0, 0.5, 1.0};
  CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(-7.5));
  CHECK(kernels::scalar::squared_distance(a.data(), b.data(), 3) ==
        doctest::Approx(0.25 + 9.0 + 25.0));
  CHECK(kernels::scalar::weighted_squared_distance(a.data(), b.data(), w.data(), 3) ==
        doctest::Approx(2.0 * 0.25 + 0.5 * 9.0 + 25.0));
  CHECK(kernels::scalar::manhattan_distance(a.data(), b.data(), 3) ==
        doctest::Approx(0.5 + 3.0 + 5.0));
}

TEST_CASE("empty and single-element inputs") {
  const double x = 2.0, y = -3.0;
  CHECK(kernels::scalar::dot(&x, &y, 0) == 0.0);
  CHECK(kernels::scalar::dot(&x, &y, 1) == -6.0);
  CHECK(kernels::scalar::manhattan_distance(&x, &y, 1) == 5.0);
}

#if defined(RFLAB_HAVE_AVX2)
TEST_CASE("avx2 variants match the scalar reference") {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return;
  std::mt19937_64 rng(20240811);
  for (size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 200u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const auto w = random_vec(rng, n, 0.01, 4.0);
    const double tol = 1e-12 * (1.0 + n);
    CHECK(kernels::avx2::dot(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::dot(a.data(), b.data(), n)).epsilon(tol));
    CHECK(kernels::avx2::squared_distance(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::squared_distance(a.data(), b.data(), n))
              .epsilon(tol));
    CHECK(kernels::avx2::weighted_squared_distance(a.data(), b.data(), w.data(), n) ==
          doctest::Approx(
              kernels::scalar::weighted_squared_distance(a.data(), b.data(), w.data(), n))
              .epsilon(tol));
    CHECK(kernels::avx2::manhattan_distance(a.data(), b.data(), n) ==
          doctest::Approx(kernels::scalar::manhattan_distance(a.data(), b.data(), n))
              .epsilon(tol));
  }
}
#endif

TEST_CASE("dispatched entry points agree with the scalar reference") {
  INFO("active kernel set: ", kernels::active_set());
  std::mt19937_64 rng(7);
  const auto a = random_vec(rng, 37);
  const auto b = random_vec(rng, 37);
  const auto w = random_vec(rng, 37, 0.01, 4.0);
  CHECK(kernels::dot(a, b) ==
        doctest::Approx(kernels::scalar::dot(a.data(), b.data(), a.size())).epsilon(1e-12));
  CHECK(kernels::squared_distance(a, b) ==
        doctest::Approx(kernels::scalar::squared_distance(a.data(), b.data(), a.size()))
            .epsilon(1e-12));
  CHECK(kernels::weighted_squared_distance(a, b, w) ==
        doctest::Approx(kernels::scalar::weighted_squared_distance(a.data(), b.data(),
                                                                   w.data(), a.size()))
            .epsilon(1e-12));
  CHECK(kernels::manhattan_distance(a, b) ==
        doctest::Approx(kernels::scalar::manhattan_distance(a.data(), b.data(), a.size()))
            .epsilon(1e-12));
}

TEST_CASE("symmetric quadratic form") {
  Matrix m(2, 2);
  m.at(0, 0) = 2.0;
  m.at(1, 1) = 0.5;
  const std::vector<double> d{1.0, 2.0};
  CHECK(sym_quadratic_form(m, d) == doctest::Approx(4.0));

  // Off-diagonal terms count twice.
  m.at(0, 1) = m.at(1, 0) = 0.25;
  CHECK(sym_quadratic_form(m, d) == doctest::Approx(4.0 + 2.0 * 0.25 * 2.0));
}
