#pragma once

// Helpers shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rectfree/rational.hpp"

namespace testing {

/// Random rational p/q with |p| <= span and 1 <= q <= den.
inline rectfree::Rational random_rational(std::mt19937_64& gen, int span = 9, int den = 7) {
  std::uniform_int_distribution<int> num(-span, span);
  std::uniform_int_distribution<int> d(1, den);
  return rectfree::Rational(num(gen), d(gen));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Even moments of the symmetric law with atoms +-r_i of total weight w_i.
inline std::vector<rectfree::Rational> atomic_moments(const std::vector<std::pair<int, rectfree::Rational>>& r2_w,
                                                      int order) {
  std::vector<rectfree::Rational> m(order, rectfree::Rational(0));
  for (const auto& [r2, w] : r2_w) {
    rectfree::Rational pw(1);
    for (int k = 0; k < order; ++k) {
      pw *= r2;
      m[k] += w * pw;
    }
  }
  return m;
}

}  // namespace testing
