#include <cstdlib>
#include <string>

#include "rectfree/error.hpp"
#include "rectfree/kernels.hpp"

namespace rectfree::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("RECTFREE_SIMD"); env != nullptr && std::string(env) == "scalar")
    return Isa::scalar;
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void check_sizes(std::size_t s, std::size_t p) {
  if (s != p) throw InvalidArgument("kernels: node and weight arrays differ in length");
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

ResolventSums resolvent_sums(Isa isa, std::span<const double> s, std::span<const double> p,
                             std::complex<double> u) {
  check_sizes(s.size(), p.size());
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return detail::resolvent_sums_avx2(s.data(), p.data(), s.size(), u);
#endif
  return detail::resolvent_sums_scalar(s.data(), p.data(), s.size(), u);
}

ResolventSums resolvent_sums(std::span<const double> s, std::span<const double> p,
                             std::complex<double> u) {
  return resolvent_sums(active_isa(), s, p, u);
}

void power_sums(Isa isa, std::span<const double> s, std::span<const double> p,
                std::span<double> out) {
  check_sizes(s.size(), p.size());
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) {
    detail::power_sums_avx2(s.data(), p.data(), s.size(), out.data(), out.size());
    return;
  }
#endif
  detail::power_sums_scalar(s.data(), p.data(), s.size(), out.data(), out.size());
}

void power_sums(std::span<const double> s, std::span<const double> p, std::span<double> out) {
  power_sums(active_isa(), s, p, out);
}

}  // namespace rectfree::kernels
