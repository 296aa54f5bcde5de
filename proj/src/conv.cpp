#include "rectfree/conv.hpp"

#include <cmath>

#include "rectfree/error.hpp"

namespace rectfree::conv {

std::vector<double> convolve_moments(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double lambda,
                                     int order) {
  const auto m1 = moments(mu1, order);
  const auto m2 = moments(mu2, order);
  return convolve_moments<double>(m1, m2, lambda, order);
}

std::vector<double> half_line_moments(const HalfLineMeasure& rho, int n_max) {
  if (n_max < 0) throw InvalidArgument("half_line_moments: n_max must be nonnegative");
  std::vector<double> out(n_max, 0.0);
  auto add = [&](double y, double w) {
    double p = 1.0;
    for (int n = 0; n < n_max; ++n) {
      p *= y;
      out[n] += w * p;
    }
  };
  for (const auto& a : rho.atoms) add(a.location, a.weight);
  for (std::size_t i = 0; i < rho.x.size(); ++i) add(rho.x[i], rho.density[i] * rho.weights[i]);
  return out;
}

std::vector<double> convolve_lambda0(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int order) {
  if (mu1.is_moment_sequence() || mu2.is_moment_sequence()) {
    const auto m1 = moments(mu1, order);
    const auto m2 = moments(mu2, order);
    return convolve_lambda0<double>(m1, m2, order);
  }
  if (!mu1.bounded() || !mu2.bounded()) throw InvalidArgument("convolve_lambda0: unbounded support, moments are infinite");
  const auto r1 = half_line_moments(pushforward_square(mu1), order);
  const auto r2 = half_line_moments(pushforward_square(mu2), order);
  return convolve_lambda0<double>(r1, r2, order);
}

std::vector<double> free_convolve_moments(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int order) {
  const auto n1 = interleave_odd_zeros<double>(moments(mu1, order), order);
  const auto n2 = interleave_odd_zeros<double>(moments(mu2, order), order);
  return free_convolve_moments<double>(n1, n2, 2 * order);
}

analytic::Recovery convolve_analytic(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double lambda,
                                     const std::vector<double>& x_grid, const analytic::RecoveryOptions& options) {
  const auto c = analytic::RectTransform::from_measure(mu1, lambda) + analytic::RectTransform::from_measure(mu2, lambda);
  return analytic::recover_measure(c, x_grid, options);
}

}  // namespace rectfree::conv
