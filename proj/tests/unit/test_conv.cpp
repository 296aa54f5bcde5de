#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rectfree/closedforms.hpp"
#include "rectfree/conv.hpp"
#include "rectfree/measure.hpp"
#include "rectfree/rational.hpp"
#include "support.hpp"

using namespace rectfree;
using namespace rectfree::conv;

namespace {

// Random atomic law on the half-line with integer squared radii and rational weights.
std::vector<Rational> random_atomic_moments(std::mt19937_64& gen, int order) {
  std::uniform_int_distribution<int> r2(0, 4), w(1, 5), count(1, 3);
  std::vector<std::pair<int, Rational>> atoms;
  const int n = count(gen);
  Rational total(0);
  for (int i = 0; i < n; ++i) {
    atoms.emplace_back(r2(gen), Rational(w(gen)));
    total += atoms.back().second;
  }
  for (auto& a : atoms) a.second /= total;
  return testing::atomic_moments(atoms, order);
}

bool hankel_positive(const std::vector<double>& even_moments, int size) {
  // Hankel matrix of the law of X^2: entries m_{2(i+j)} with m_0 = 1.
  Eigen::MatrixXd h(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) h(i, j) = (i + j == 0) ? 1.0 : even_moments[i + j - 1];
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff() > -1e-9;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}

}  // namespace

TEST_CASE("delta_0 is neutral") {
  const auto bern = SymmetricMeasure::bernoulli(1.3);
  const auto dirac = SymmetricMeasure::dirac0();
  for (double lambda : {0.0, 0.4, 1.0}) {
    const auto m = convolve_moments(bern, dirac, lambda, 6);
    const auto want = moments(bern, 6);
    for (int k = 0; k < 6; ++k) CHECK(testing::rel_err(m[k], want[k]) < 1e-12);
  }
  const auto l0 = convolve_lambda0(bern, dirac, 6);
  for (int k = 0; k < 6; ++k) CHECK(testing::rel_err(l0[k], std::pow(1.69, k + 1)) < 1e-12);
}

TEST_CASE("Bernoulli self-convolution moments") {
  const auto bern = SymmetricMeasure::bernoulli();
  for (double lambda : {0.0, 0.25, 0.5, 1.0}) {
    const auto m = convolve_moments(bern, bern, lambda, 4);
    CHECK(m[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(4.0 + 2.0 * lambda).epsilon(1e-14));
    CHECK(hankel_positive(m, 3));
  }
  // Exact: cumulants (2, -2 lambda, 4 lambda^2, ...) in rationals.
  const Rational lambda(1, 2);
  const std::vector<Rational> ones(4, Rational(1));
  const auto m = convolve_moments<Rational>(ones, ones, lambda, 4);
  CHECK(m[0] == 2);
  CHECK(m[1] == 5);
  const std::vector<Rational> c{2, -2 * lambda, 4 * lambda * lambda, -10 * lambda * lambda * lambda};
  CHECK(m == series::moments_from_cumulants<Rational>(c, lambda, 4));
}

TEST_CASE("Gaussian semigroup at the moment level") {
  for (double lambda : {0.2, 0.5, 1.0}) {
    const auto a = closedforms::rect_gaussian(lambda, 0.6).to_measure(4000);
    const auto b = closedforms::rect_gaussian(lambda, 1.4).to_measure(4000);
    const auto m = convolve_moments(a, b, lambda, 5);
    const std::vector<double> c{2.0, 0, 0, 0, 0};
    const auto want = series::moments_from_cumulants<double>(c, lambda, 5);
    for (int k = 0; k < 5; ++k) CHECK(testing::rel_err(m[k], want[k]) < 1e-7);
    const auto direct = moments(closedforms::rect_gaussian(lambda, 2.0).to_measure(4000), 5);
    for (int k = 0; k < 5; ++k) CHECK(testing::rel_err(m[k], direct[k]) < 1e-7);
  }
}

TEST_CASE("algebraic laws in exact arithmetic") {
  std::mt19937_64 gen(21);
  for (const Rational lambda : {Rational(0), Rational(1, 3), Rational(1)}) {
    const auto a = random_atomic_moments(gen, 6);
    const auto b = random_atomic_moments(gen, 6);
    const auto c = random_atomic_moments(gen, 6);
    const auto ab = convolve_moments<Rational>(a, b, lambda, 6);
    CHECK(ab == convolve_moments<Rational>(b, a, lambda, 6));
    const auto ab_c = convolve_moments<Rational>(ab, c, lambda, 6);
    const auto bc = convolve_moments<Rational>(b, c, lambda, 6);
    CHECK(ab_c == convolve_moments<Rational>(a, bc, lambda, 6));

    // Dilation: m_{2k}(D_s mu) = s^{2k} m_{2k}(mu), and D_s commutes with the convolution.
    const Rational s2(9, 4);
    auto dilate = [&](std::vector<Rational> m) {
      Rational p(1);
      for (auto& v : m) {
        p *= s2;
        v *= p;
      }
      return m;
    };
    CHECK(convolve_moments<Rational>(dilate(a), dilate(b), lambda, 6) == dilate(ab));
  }
}

TEST_CASE("lambda = 0 degeneration") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_atomic_moments(gen, 8);
    const auto b = random_atomic_moments(gen, 8);
    CHECK(convolve_lambda0<Rational>(a, b, 8) == convolve_moments<Rational>(a, b, Rational(0), 8));
  }
  const auto bern = SymmetricMeasure::bernoulli();
  const auto m = convolve_lambda0(bern, bern, 8);
  for (int n = 1; n <= 8; ++n) CHECK(m[n - 1] == doctest::Approx(std::pow(2.0, n)).epsilon(1e-12));

  const auto semi = SymmetricMeasure::from_moments({1.0, 2.0, 5.0}, 2.0);
  const auto ms = convolve_lambda0(semi, bern, 3);
  const std::vector<double> m1{1, 2, 5}, m2{1, 1, 1};
  const auto want = convolve_lambda0<double>(m1, m2, 3);
  for (int k = 0; k < 3; ++k) CHECK(ms[k] == doctest::Approx(want[k]));
  CHECK_THROWS_AS(convolve_lambda0(closedforms::rect_cauchy(0.5, 1.0).to_measure(500), bern, 2), InvalidArgument);
}

TEST_CASE("lambda = 1 degeneration and free convolution") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_atomic_moments(gen, 8);
    const auto b = random_atomic_moments(gen, 8);
    const auto rect = convolve_moments<Rational>(a, b, Rational(1), 8);
    const auto full = free_convolve_moments<Rational>(interleave_odd_zeros<Rational>(a, 8),
                                                       interleave_odd_zeros<Rational>(b, 8), 16);
    for (int k = 0; k < 8; ++k) {
      CHECK(full[2 * k] == 0);
      CHECK(full[2 * k + 1] == rect[k]);
    }
  }
  const auto bern = SymmetricMeasure::bernoulli();
  const auto arcsine = free_convolve_moments(bern, bern, 3);
  CHECK(arcsine[1] == doctest::Approx(2.0));
  CHECK(arcsine[3] == doctest::Approx(6.0));
  CHECK(arcsine[5] == doctest::Approx(20.0));

  // Semicircle variances add.
  const std::vector<Rational> s1{0, 2, 0, 8}, s2{0, 3, 0, 18};
  const auto s = free_convolve_moments<Rational>(s1, s2, 4);
  CHECK(s[1] == 5);
  CHECK(s[3] == 50);
}

TEST_CASE("half-line moments") {
  HalfLineMeasure rho;
  rho.atoms = {{0.0, 0.5}, {2.0, 0.5}};
  const auto m = half_line_moments(rho, 3);
  CHECK(m == std::vector<double>{1.0, 2.0, 4.0});
  CHECK_THROWS_AS(half_line_moments(rho, -1), InvalidArgument);
}

TEST_CASE("analytic convolution") {
  const auto bern = SymmetricMeasure::bernoulli();
  const double lambda = 0.5;
  const auto r = convolve_analytic(bern, bern, lambda, uniform_grid(0.0, 2.2, 111));
  const auto iv = closedforms::bernoulli_conv_support(lambda).front();
  const double margin = 0.02 * (iv.hi - iv.lo);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double exact = closedforms::bernoulli_conv_density(lambda, r.x[i]);
    if (r.x[i] > iv.lo + margin && r.x[i] < iv.hi - margin) CHECK(std::abs(r.density[i] - exact) < 5e-3);
    if (r.x[i] > iv.hi + 0.05 || r.x[i] < iv.lo - 0.05) CHECK(r.density[i] < 1e-3);
  }
  CHECK(std::abs(r.residual) < 2e-2);

  const auto g1 = closedforms::rect_gaussian(lambda, 1.0).to_measure(2000);
  const auto g2 = closedforms::rect_gaussian(lambda, 0.5).to_measure(2000);
  const auto gr = convolve_analytic(g1, g2, lambda, uniform_grid(0.0, 2.5, 101));
  const auto gv = closedforms::rect_gaussian_support(lambda, 1.5).front();
  for (std::size_t i = 0; i < gr.x.size(); ++i) {
    if (gr.x[i] > gv.lo + 0.05 && gr.x[i] < gv.hi - 0.05)
      CHECK(std::abs(gr.density[i] - closedforms::rect_gaussian_density(lambda, 1.5, gr.x[i])) < 1e-2);
  }

  const auto id = convolve_analytic(g1, SymmetricMeasure::dirac0(), lambda, uniform_grid(0.0, 2.0, 61));
  const auto gs = closedforms::rect_gaussian_support(lambda, 1.0).front();
  for (std::size_t i = 0; i < id.x.size(); ++i) {
    if (id.x[i] > gs.lo + 0.05 && id.x[i] < gs.hi - 0.05)
      CHECK(std::abs(id.density[i] - closedforms::rect_gaussian_density(lambda, 1.0, id.x[i])) < 1e-2);
  }
}

TEST_CASE("small perturbations of the inputs move the output a little") {
  const double lambda = 0.5;
  const auto grid = uniform_grid(0.0, 2.5, 61);
  const auto base = convolve_analytic(SymmetricMeasure::bernoulli(), SymmetricMeasure::bernoulli(), lambda, grid);
  const auto moved = convolve_analytic(SymmetricMeasure::bernoulli(1.01), SymmetricMeasure::bernoulli(), lambda, grid);
  CHECK(weak_distance(base.measure, moved.measure) < 0.05);
}
