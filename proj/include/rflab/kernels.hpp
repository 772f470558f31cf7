#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

// Inner-loop arithmetic kernels. The scalar namespace holds the reference
// implementations; the avx2 namespace holds the vectorized variants compiled
// only on x86-64. The unqualified entry points dispatch once at startup based
// on the running CPU (override with RF_LAB_SIMD=off).

namespace rflab::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n);
double manhattan_distance(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(RFLAB_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double weighted_squared_distance(const double* a, const double* b, const double* w,
                                 std::size_t n);
double manhattan_distance(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

// Name of the kernel set selected at runtime: "avx2" or "scalar".
std::string_view active_set();

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double weighted_squared_distance(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> w);
double manhattan_distance(std::span<const double> a, std::span<const double> b);

}  // namespace rflab::kernels
