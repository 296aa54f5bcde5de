#pragma once

// The rectangular free convolution with ratio lambda: series path (default),
// analytic path, and the lambda = 0 / lambda = 1 specializations.

#include <span>
#include <vector>

#include "rectfree/analytic.hpp"
#include "rectfree/measure.hpp"
#include "rectfree/series.hpp"

namespace rectfree::conv {

/// Even moments of mu1 (+)_lambda mu2 from their even moments:
/// moments_from_cumulants(c(mu1) + c(mu2)).
template <class T>
std::vector<T> convolve_moments(std::span<const T> m1, std::span<const T> m2, const T& lambda, int order) {
  auto c1 = series::cumulants_from_moments(m1, lambda, order);
  const auto c2 = series::cumulants_from_moments(m2, lambda, order);
  for (int k = 0; k < order; ++k) c1[k] += c2[k];
  return series::moments_from_cumulants<T>(c1, lambda, order);
}

/// Additive free convolution on full moment lists m_1..m_N (odd entries
/// included) through free cumulants.
template <class T>
std::vector<T> free_convolve_moments(std::span<const T> nu1, std::span<const T> nu2, int order) {
  auto k1 = series::free_cumulants_from_moments(nu1, order);
  const auto k2 = series::free_cumulants_from_moments(nu2, order);
  for (int k = 0; k < order; ++k) k1[k] += k2[k];
  return series::free_moments_from_cumulants<T>(k1, order);
}

/// lambda = 0 route: the n-th moment of the square push-forward is m_{2n}, so
/// the even moments of the result are the moments of the free convolution of
/// the push-forwards.
template <class T>
std::vector<T> convolve_lambda0(std::span<const T> m1, std::span<const T> m2, int order) {
  return free_convolve_moments(m1, m2, order);
}

/// Even moments m_1, ..., padded with zero odd moments: m_1..m_{2 order}.
template <class T>
std::vector<T> interleave_odd_zeros(std::span<const T> even_moments, int order) {
  std::vector<T> full(2 * order, T(0));
  for (int k = 0; k < order; ++k) full[2 * k + 1] = even_moments[k];
  return full;
}

// Measure-level entry points (numeric backend).

std::vector<double> convolve_moments(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double lambda,
                                     int order);

/// Push-forwards by x -> x^2, free convolution of their moment sequences, and
/// the result read back as even moments.
std::vector<double> convolve_lambda0(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int order);

/// Full moment list m_1..m_{2 order} of mu1 (+) mu2 (odd entries zero).
std::vector<double> free_convolve_moments(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int order);

/// recover_measure applied to C_{mu1} + C_{mu2}.
analytic::Recovery convolve_analytic(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double lambda,
                                     const std::vector<double>& x_grid,
                                     const analytic::RecoveryOptions& options = {});

/// Moments of a half-line measure: int y^n d rho(y), n = 1..n_max.
std::vector<double> half_line_moments(const HalfLineMeasure& rho, int n_max);

}  // namespace rectfree::conv
