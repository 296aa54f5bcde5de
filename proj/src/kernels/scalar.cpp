#include "rectfree/kernels.hpp"

namespace rectfree::kernels::detail {

ResolventSums resolvent_sums_scalar(const double* s, const double* p, std::size_t n,
                                    std::complex<double> u) {
  const double ur = u.real();
  const double ui = u.imag();
  double vr = 0, vi = 0, dr = 0, di = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // r = 1 / (1 - s u)
    const double ar = 1.0 - s[i] * ur;
    const double ai = -s[i] * ui;
    const double inv = 1.0 / (ar * ar + ai * ai);
    const double rr = ar * inv;
    const double ri = -ai * inv;
    vr += p[i] * rr;
    vi += p[i] * ri;
    const double ps = p[i] * s[i];
    dr += ps * (rr * rr - ri * ri);
    di += ps * (2.0 * rr * ri);
  }
  return {{vr, vi}, {dr, di}};
}

void power_sums_scalar(const double* s, const double* p, std::size_t n, double* out,
                       std::size_t k_max) {
  for (std::size_t k = 0; k < k_max; ++k) out[k] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = p[i];
    for (std::size_t k = 0; k < k_max; ++k) {
      t *= s[i];
      out[k] += t;
    }
  }
}

}  // namespace rectfree::kernels::detail
