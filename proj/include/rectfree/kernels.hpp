#pragma once

// Data-parallel inner loops. Every symmetric measure is reduced to a half-line
// quadrature (s_i = r_i^2 >= 0, weights p_i), and the transforms only ever need
//
//   K(u)  = sum_i p_i / (1 - s_i u)          K'(u) = sum_i p_i s_i / (1 - s_i u)^2
//   P_k   = sum_i p_i s_i^k                  (k = 1..k_max)
//
// Each has a scalar reference and an AVX2+FMA variant; the variant is picked
// once at runtime from cpuid (override with RECTFREE_SIMD=scalar).

#include <complex>
#include <span>
#include <string_view>

namespace rectfree::kernels {

enum class Isa { scalar, avx2 };

struct ResolventSums {
  std::complex<double> value;
  std::complex<double> derivative;
};

bool isa_available(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);

ResolventSums resolvent_sums(std::span<const double> s, std::span<const double> p,
                             std::complex<double> u);
ResolventSums resolvent_sums(Isa isa, std::span<const double> s, std::span<const double> p,
                             std::complex<double> u);

/// out[k-1] = sum_i p_i s_i^k for k = 1..out.size().
void power_sums(std::span<const double> s, std::span<const double> p, std::span<double> out);
void power_sums(Isa isa, std::span<const double> s, std::span<const double> p,
                std::span<double> out);

namespace detail {
ResolventSums resolvent_sums_scalar(const double* s, const double* p, std::size_t n,
                                    std::complex<double> u);
void power_sums_scalar(const double* s, const double* p, std::size_t n, double* out,
                       std::size_t k_max);
#if defined(__x86_64__) || defined(_M_X64)
ResolventSums resolvent_sums_avx2(const double* s, const double* p, std::size_t n,
                                  std::complex<double> u);
void power_sums_avx2(const double* s, const double* p, std::size_t n, double* out,
                     std::size_t k_max);
#endif
}  // namespace detail

}  // namespace rectfree::kernels
