// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/core.h>

#include "rectfree/analytic.hpp"
#include "rectfree/closedforms.hpp"
#include "rectfree/conv.hpp"
#include "rectfree/measure.hpp"
#include "rectfree/ncpart.hpp"
#include "rectfree/rational.hpp"
#include "rectfree/rmt.hpp"
#include "rectfree/series.hpp"

using namespace rectfree;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("{} [{:>2}] {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, secs);
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational random_rational(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  return Rational(num(gen), den(gen));
}

// Even moments m_2..m_{2 order} of a random rational atomic law (squared radii 0..4).
std::vector<Rational> random_law_moments(std::mt19937_64& gen, int order) {
  std::uniform_int_distribution<int> r2(0, 4), w(1, 6), count(1, 4);
  const int n = count(gen);
  std::vector<std::pair<int, Rational>> atoms;
  Rational total(0);
  for (int i = 0; i < n; ++i) {
    atoms.emplace_back(r2(gen), Rational(w(gen)));
    total += atoms.back().second;
  }
  std::vector<Rational> m(order, Rational(0));
  for (auto& [s, wt] : atoms) {
    Rational p(1);
    for (int k = 0; k < order; ++k) {
      p *= s;
      m[k] += wt / total * p;
    }
  }
  return m;
}

// 2 * int over the positive-side support of x^k f(x), by tanh-sinh quadrature.
double quad_moment(const std::function<double(double)>& f, const std::vector<Interval>& support, int k) {
  boost::math::quadrature::tanh_sinh<double> q(15);
  double total = 0.0;
  for (const auto& iv : support) total += q.integrate([&](double x) { return std::pow(x, k) * f(x); }, iv.lo, iv.hi);
  return 2.0 * total;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2024);
  int instances = 0;
  for (const Rational lambda : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Rational> c(6);
      for (auto& v : c) v = random_rational(gen);
      const auto fast = series::moments_from_cumulants<Rational>(c, lambda, 6);
      const auto slow = ncpart::moments_from_cumulants_oracle<Rational>(c, lambda, 6);
      if (fast != slow) return {false, "mismatch at lambda = " + lambda.str()};
      ++instances;
    }
  }
  const double secs = seconds_since(t0);
  return {secs < 5.0, fmt::format("{} instances exact up to m_12, runtime {:.2f} s (limit 5 s)", instances, secs)};
}

Outcome round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = u(gen);
    // Even moments of a random mixture of centered uniform laws: m_2k = sum w b^2k / (2k + 1).
    const int parts = 1 + trial % 5;
    std::vector<double> b2(parts), w(parts);
    double total = 0.0;
    for (int i = 0; i < parts; ++i) {
      b2[i] = 0.2 + 1.8 * u(gen);
      w[i] = 0.1 + u(gen);
      total += w[i];
    }
    std::vector<double> m(20, 0.0);
    for (int i = 0; i < parts; ++i) {
      double p = 1.0;
      for (int k = 0; k < 20; ++k) {
        p *= b2[i];
        m[k] += w[i] / total * p / (2 * k + 3);
      }
    }
    const auto c = series::cumulants_from_moments<double>(m, lambda, 20);
    const auto back = series::moments_from_cumulants<double>(c, lambda, 20);
    for (int k = 0; k < 20; ++k) worst = std::max(worst, std::abs(back[k] - m[k]) / m[k]);
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-9 && secs < 1.0,
          fmt::format("order 20, 100 random laws, moments -> cumulants -> moments max rel error {:.2e} (<1e-9); "
                      "runtime {:.3f} s (limit 1 s)",
                      worst, secs)};
}

Outcome u_series() {
  for (const Rational lambda : {Rational(0), Rational(1, 3), Rational(1, 2), Rational(2, 7), Rational(1)}) {
    const auto u = series::U_series(lambda, 8);
    // (-1)^{n-1} lambda^{n-1} binom(2n, n) / (2 (lambda+1)^{2n-1} (2n-1)), evaluated term by term.
    for (int n = 1; n <= 8; ++n) {
      Rational binom(1);
      for (int i = 1; i <= n; ++i) binom = binom * (n + i) / i;
      Rational lp(1), base(1);
      for (int i = 0; i < n - 1; ++i) lp *= lambda;
      for (int i = 0; i < 2 * n - 1; ++i) base *= lambda + 1;
      Rational want = lp * binom / (2 * base * (2 * n - 1));
      if (n % 2 == 0) want = -want;
      if (u[n] != want) return {false, fmt::format("coefficient {} differs at lambda = {}", n, lambda.str())};
    }
    auto t = series::T_series(lambda, 8);
    t[0] = 0;
    if (u.compose(t) != series::TruncatedSeries<Rational>::identity(8))
      return {false, "U o (T - 1) != X at lambda = " + lambda.str()};
  }
  return {true, "8 coefficients exact and U o (T - 1) = X mod X^9 for lambda in {0, 1/3, 1/2, 2/7, 1}"};
}

Outcome bernoulli_convolution() {
  double worst_norm = 0.0, worst_mom = 0.0, worst_arcsine = 0.0;
  for (double lambda : {0.25, 0.5, 0.9, 1.0}) {
    const auto f = [lambda](double x) { return closedforms::bernoulli_conv_density(lambda, x); };
    const auto support = closedforms::bernoulli_conv_support(lambda);
    worst_norm = std::max(worst_norm, std::abs(quad_moment(f, support, 0) - 1.0));
    const auto bern = SymmetricMeasure::bernoulli();
    const auto m = conv::convolve_moments(bern, bern, lambda, 3);
    for (int k = 1; k <= 3; ++k) worst_mom = std::max(worst_mom, std::abs(quad_moment(f, support, 2 * k) - m[k - 1]));
  }
  for (int i = 0; i < 100; ++i) {
    const double x = -2.0 + 4.0 * (i + 0.5) / 100.0;
    const double arcsine = 1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x));
    worst_arcsine = std::max(worst_arcsine, std::abs(closedforms::bernoulli_conv_density(1.0, x) - arcsine));
  }
  return {worst_norm < 1e-7 && worst_mom < 1e-6 && worst_arcsine < 1e-10,
          fmt::format("normalization {:.1e} (<1e-7), m2/m4/m6 vs series {:.1e} (<1e-6), arcsine {:.1e} (<1e-10)",
                      worst_norm, worst_mom, worst_arcsine)};
}

Outcome lambda0() {
  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_law_moments(gen, 8);
    const auto b = random_law_moments(gen, 8);
    if (conv::convolve_lambda0<Rational>(a, b, 8) != conv::convolve_moments<Rational>(a, b, Rational(0), 8))
      return {false, fmt::format("route mismatch on pair {}", trial)};
  }
  const std::vector<Rational> ones(8, Rational(1));
  const auto exact = conv::convolve_lambda0<Rational>(ones, ones, 8);
  const auto numeric = conv::convolve_lambda0(SymmetricMeasure::bernoulli(), SymmetricMeasure::bernoulli(), 8);
  for (int n = 1; n <= 8; ++n) {
    if (exact[n - 1] != Rational(1 << n)) return {false, fmt::format("Bernoulli m_{} != 2^{}", 2 * n, n)};
    if (std::abs(numeric[n - 1] - std::ldexp(1.0, n)) > 1e-12 * std::ldexp(1.0, n))
      return {false, fmt::format("numeric Bernoulli m_{} != 2^{}", 2 * n, n)};
  }
  return {true, "20 random pairs exact to order 8; Bernoulli moments 2^n exactly"};
}

Outcome lambda1() {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_law_moments(gen, 8);
    const auto b = random_law_moments(gen, 8);
    const auto rect = conv::convolve_moments<Rational>(a, b, Rational(1), 8);
    const auto full = conv::free_convolve_moments<Rational>(conv::interleave_odd_zeros<Rational>(a, 8),
                                                            conv::interleave_odd_zeros<Rational>(b, 8), 16);
    for (int k = 0; k < 8; ++k)
      if (full[2 * k] != 0 || full[2 * k + 1] != rect[k]) return {false, fmt::format("mismatch on pair {}", trial)};
  }
  return {true, "20 random symmetric pairs, exact to order 8"};
}

// Uniform recovery grid on [0, xmax].
std::vector<double> recovery_grid(double xmax) {
  std::vector<double> x(301);
  for (int i = 0; i <= 300; ++i) x[i] = xmax * i / 300.0;
  return x;
}

Outcome loop_closure() {
  std::string detail;
  bool pass = true;
  for (double lambda : {0.5, 1.0}) {
    for (const auto& entry : {closedforms::bernoulli_conv(lambda), closedforms::rect_gaussian(lambda, 1.0)}) {
      const auto t0 = Clock::now();
      const auto mu = entry.to_measure(4000);
      const auto c = analytic::RectTransform::from_measure(mu, lambda);
      const auto iv = entry.support.front();
      const auto r = analytic::recover_measure(c, recovery_grid(iv.hi + 0.3));
      const double margin = 0.02 * (iv.hi - iv.lo);
      double err = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i)
        if (r.x[i] > iv.lo + margin && r.x[i] < iv.hi - margin)
          err = std::max(err, std::abs(r.density[i] - (*entry.density)(r.x[i])));
      const double secs = seconds_since(t0);
      const bool ok = err < 5e-3 && std::abs(r.residual) < 2e-2 && secs < 30.0;
      pass = pass && ok;
      detail += fmt::format("{}{} lambda={}: sup {:.1e}, residual {:.1e}, {:.1f} s", detail.empty() ? "" : "; ",
                            closedforms::family_name(entry.family), lambda, err, r.residual, secs);
    }
  }
  return {pass, detail};
}

Outcome semigroups() {
  using namespace closedforms;
  const std::vector<cplx> points{cplx(-1e-3), cplx(-0.05), cplx(-0.4), cplx(-0.1, 0.2), cplx(-0.2, -0.3)};
  double worst_c = 0.0;
  for (double lambda : {0.0, 0.5, 1.0}) {
    for (cplx z : points) {
      worst_c = std::max(worst_c, std::abs((rect_gaussian_C(lambda, 0.7) + rect_gaussian_C(lambda, 1.3)).eval(z).value -
                                           rect_gaussian_C(lambda, 2.0).eval(z).value));
      worst_c = std::max(worst_c, std::abs((rect_cauchy_C(lambda, 0.3) + rect_cauchy_C(lambda, 0.9)).eval(z).value -
                                           rect_cauchy_C(lambda, 1.2).eval(z).value));
      worst_c = std::max(worst_c, std::abs((rect_poisson_C(lambda, 0.5) + rect_poisson_C(lambda, 1.5)).eval(z).value -
                                           rect_poisson_C(lambda, 2.0).eval(z).value));
    }
  }

  // Moment level, order 10. Gaussian moments by quadrature of the densities; Poisson moments
  // from the series head of its transform. The Cauchy analogue has no moments.
  double worst_m = 0.0;
  constexpr int order = 10;
  for (double lambda : {0.3, 0.5, 1.0}) {
    auto quad = [&](double s2) {
      std::vector<double> m(order);
      const auto f = [=](double x) { return rect_gaussian_density(lambda, s2, x); };
      for (int k = 1; k <= order; ++k) m[k - 1] = quad_moment(f, rect_gaussian_support(lambda, s2), 2 * k);
      return m;
    };
    const auto a = quad(0.7), b = quad(1.3), sum = quad(2.0);
    const auto conv_m = conv::convolve_moments<double>(a, b, lambda, order);
    for (int k = 0; k < order; ++k) worst_m = std::max(worst_m, std::abs(conv_m[k] - sum[k]) / sum[k]);

    auto poisson = [&](double cc) {
      return series::moments_from_cumulants<double>(rect_poisson_C(lambda, cc).series_head(), lambda, order);
    };
    const auto pc = conv::convolve_moments<double>(poisson(0.5), poisson(1.5), lambda, order);
    const auto pw = poisson(2.0);
    for (int k = 0; k < order; ++k) worst_m = std::max(worst_m, std::abs(pc[k] - pw[k]) / pw[k]);
  }
  return {worst_c < 1e-14 && worst_m < 1e-8,
          fmt::format("C-additivity max deviation {:.1e}; Gaussian/Poisson moments to order 10 max rel {:.1e} (<1e-8)",
                      worst_c, worst_m)};
}

Outcome monte_carlo() {
  const auto t0 = Clock::now();
  const auto bern = SymmetricMeasure::bernoulli();
  rmt::McOptions opt;
  opt.n_moments = 2;
  const auto rep = rmt::mc_convolution(bern, bern, 150, 300, 50, 42, opt);
  const double secs = seconds_since(t0);
  const auto& m2 = rep.moments[0];
  const auto& m4 = rep.moments[1];
  return {std::abs(m2.z_score) < 3 && std::abs(m4.z_score) < 3 && std::abs(m2.predicted - 2.0) < 1e-12 && secs < 60,
          fmt::format("m2 {:.5f} +- {:.5f} vs {:.4f} (z {:.2f}); m4 {:.4f} +- {:.4f} vs {:.4f} (z {:.2f}); {:.1f} s",
                      m2.empirical, m2.standard_error, m2.predicted, m2.z_score, m4.empirical, m4.standard_error,
                      m4.predicted, m4.z_score, secs)};
}

Outcome null_ratio() {
  const std::string word = "M1* M2 M1* M2";
  const auto null = rmt::null_ratio_trace(50, 2000, word, 100, 42);
  const auto square = rmt::null_ratio_trace(200, 200, word, 100, 42);
  const bool null_ok = null.mean_abs < 0.05;
  const bool near_prediction = std::abs(square.mean_abs - square.prediction) <= 3 * square.se_abs;
  const bool above = square.mean_abs > 0.05;
  return {null_ok && near_prediction && above,
          fmt::format("q1/q2=50/2000: mean|tr| {:.5f} +- {:.5f} (<0.05: {}); square 200x200: {:.5f} +- {:.5f}, "
                      "lambda=1 prediction {:.1f} (within 3 SE: {}; above 0.05: {})",
                      null.mean_abs, null.se_abs, null_ok ? "yes" : "no", square.mean_abs, square.se_abs,
                      square.prediction, near_prediction ? "yes" : "no", above ? "yes" : "no")};
}

// H(x) for a transform-only family: invert z / T(C(z)) = H^{-1}(z) at the target x.
double h_from_transform(const analytic::RectTransform& c, double x) {
  const double lambda = c.lambda();
  cplx h = x;
  for (int it = 0; it < 50; ++it) {
    const auto cj = c.eval(h);
    const auto tj = analytic::T_eval(lambda, cj.value);
    const cplx g = h / tj.value - x;
    const cplx dg = (tj.value - h * tj.derivative * cj.derivative) / (tj.value * tj.value);
    const cplx step = g / dg;
    h -= step;
    if (std::abs(step) < 1e-16 * std::abs(h)) break;
  }
  return h.real();
}

Outcome tightness() {
  const double x = -1e-6;
  double worst = 0.0;
  std::string where;
  int count = 0;
  for (double lambda : {0.0, 0.25, 0.5, 1.0}) {
    for (const auto& e : closedforms::catalog(lambda)) {
      double h;
      if (e.density)
        h = analytic::H_eval(e.to_measure(4000), lambda, x).value.real();
      else
        h = h_from_transform(e.transform, x);
      const double dev = std::abs(h / x - 1.0);
      ++count;
      if (dev > worst) {
        worst = dev;
        where = fmt::format("{} at lambda={}", closedforms::family_name(e.family), lambda);
      }
    }
  }
  return {worst < 1e-3, fmt::format("{} catalog entries; worst |H(x)/x - 1| = {:.2e} ({}) at x = -1e-6", count, worst, where)};
}

}  // namespace

int main() {
  report(1, "oracle equivalence (series vs NC' enumeration)", oracle_equivalence);
  report(2, "moments <-> cumulants round trip", round_trip);
  report(3, "U-series closed formula", u_series);
  report(4, "Bernoulli self-convolution density", bernoulli_convolution);
  report(5, "lambda = 0 degeneration", lambda0);
  report(6, "lambda = 1 degeneration", lambda1);
  report(7, "analytic loop closure", loop_closure);
  report(8, "semigroups", semigroups);
  report(9, "Monte Carlo convolution", monte_carlo);
  report(10, "null-ratio trace", null_ratio);
  report(11, "tightness criterion", tightness);
  fmt::print("{} of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
