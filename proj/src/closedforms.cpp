#include "rectfree/closedforms.hpp"

#include <cmath>
#include <numbers>

#include "rectfree/error.hpp"
#include "rectfree/series.hpp"

namespace rectfree::closedforms {

using analytic::Jet;
using analytic::RectTransform;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kHeadOrder = 12;

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::bernoulli_conv: return "bernoulli_conv";
    case Family::rect_gaussian: return "rect_gaussian";
    case Family::rect_cauchy: return "rect_cauchy";
    case Family::rect_stable: return "rect_stable";
    case Family::rect_poisson: return "rect_poisson";
  }
  return "unknown";
}

SymmetricMeasure CatalogEntry::to_measure(int nodes_per_interval) const {
  if (!density) throw InvalidArgument(family_name(family) + ": no closed-form density");
  const double tail = parameters.count("t") ? parameters.at("t") : 1.0;
  return SymmetricMeasure::grid_from_function(support, *density, nodes_per_interval, 0.0, tail);
}

// --- Bernoulli self-convolution -------------------------------------------

double bernoulli_conv_kappa(double lambda) {
  check_lambda(lambda);
  return 2.0 * std::sqrt(lambda * (2.0 - lambda));
}

std::vector<Interval> bernoulli_conv_support(double lambda) {
  const double k = bernoulli_conv_kappa(lambda);
  return {{std::sqrt(2.0 - k), std::sqrt(2.0 + k)}};
}

double bernoulli_conv_density(double lambda, double x) {
  check_lambda(lambda);
  if (lambda == 0.0)
    throw InvalidArgument("bernoulli_conv_density: at lambda = 0 the law is (delta_{-sqrt2} + delta_{sqrt2})/2");
  const double k = bernoulli_conv_kappa(lambda);
  const double ax = std::abs(x);
  const auto iv = bernoulli_conv_support(lambda).front();
  if (ax < iv.lo || ax > iv.hi) return 0.0;
  if (ax == 0.0) return 1.0 / (2.0 * kPi);  // lambda = 1 only: arcsine value at 0
  const double q = x * x - 2.0;
  const double num = std::sqrt(std::max(0.0, k * k - q * q));
  const double den = kPi * lambda * ax * (4.0 - x * x);
  return den > 0.0 ? num / den : 0.0;
}

RectTransform bernoulli_C(double lambda) {
  check_lambda(lambda);
  const std::vector<double> ones(kHeadOrder, 1.0);
  auto head = series::cumulants_from_moments<double>(ones, lambda, kHeadOrder);
  return RectTransform::closed_form(
      lambda,
      [lambda](cplx z) -> Jet {
        // ((1 + 4 lambda z)^{1/2} - 1) / (2 lambda), rationalized.
        const cplx root = std::sqrt(1.0 + 4.0 * lambda * z);
        return {2.0 * z / (root + 1.0), 1.0 / root};
      },
      std::move(head), "((1+4 lambda z)^(1/2) - 1) / (2 lambda)");
}

RectTransform bernoulli_conv_C(double lambda) { return 2.0 * bernoulli_C(lambda); }

CatalogEntry bernoulli_conv(double lambda) {
  check_lambda(lambda);
  CatalogEntry e{Family::bernoulli_conv,
                 lambda,
                 {},
                 std::nullopt,
                 {},
                 bernoulli_conv_C(lambda),
                 "[kappa^2 - (x^2-2)^2]^(1/2) / (pi lambda |x| (4 - x^2)), kappa = 2 (lambda (2-lambda))^(1/2)",
                 "((1+4 lambda z)^(1/2) - 1) / lambda"};
  if (lambda > 0.0) {
    e.density = [lambda](double x) { return bernoulli_conv_density(lambda, x); };
    e.support = bernoulli_conv_support(lambda);
  }
  return e;
}

// --- Gaussian analogue ---------------------------------------------------

std::vector<Interval> rect_gaussian_support(double lambda, double sigma2) {
  check_lambda(lambda);
  if (lambda == 0.0) throw InvalidArgument("rect_gaussian: lambda = 0 is not supported");
  if (!(sigma2 > 0.0)) throw InvalidArgument("rect_gaussian: sigma^2 must be positive");
  const double s = std::sqrt(sigma2), r = std::sqrt(lambda);
  return {{s * (1.0 - r), s * (1.0 + r)}};
}

double rect_gaussian_density(double lambda, double sigma2, double x) {
  const auto iv = rect_gaussian_support(lambda, sigma2).front();
  const double ax = std::abs(x);
  if (ax < iv.lo || ax > iv.hi) return 0.0;
  if (ax == 0.0) return 1.0 / (kPi * std::sqrt(sigma2));  // lambda = 1: semicircle value at 0
  const double q = x * x / sigma2 - 1.0 - lambda;
  return std::sqrt(std::max(0.0, 4.0 * lambda - q * q)) / (2.0 * kPi * lambda * ax);
}

RectTransform rect_gaussian_C(double lambda, double sigma2) {
  check_lambda(lambda);
  std::vector<double> head(kHeadOrder, 0.0);
  head[0] = sigma2;
  return RectTransform::closed_form(
      lambda, [sigma2](cplx z) -> Jet { return {sigma2 * z, sigma2}; }, std::move(head), "sigma^2 z");
}

CatalogEntry rect_gaussian(double lambda, double sigma2) {
  return {Family::rect_gaussian,
          lambda,
          {{"sigma2", sigma2}},
          [lambda, sigma2](double x) { return rect_gaussian_density(lambda, sigma2, x); },
          rect_gaussian_support(lambda, sigma2),
          rect_gaussian_C(lambda, sigma2),
          "[4 lambda - (x^2/sigma^2 - 1 - lambda)^2]^(1/2) / (2 pi lambda |x|) on sigma (1 -+ lambda^(1/2))",
          "sigma^2 z"};
}

// --- Cauchy analogue -----------------------------------------------------

std::vector<Interval> rect_cauchy_support(double lambda, double t) {
  check_lambda(lambda);
  if (!(t > 0.0)) throw InvalidArgument("rect_cauchy: t must be positive");
  return {{t * (1.0 - lambda) / 2.0, kInf}};
}

double rect_cauchy_density(double lambda, double t, double x) {
  const double edge = rect_cauchy_support(lambda, t).front().lo;
  const double ax = std::abs(x);
  if (ax < edge || (ax == 0.0 && lambda < 1.0)) return 0.0;
  const double root = ax == 0.0 ? 1.0 : std::sqrt(std::max(0.0, 1.0 - t * t * (lambda - 1.0) * (lambda - 1.0) / (4.0 * x * x)));
  return t / (kPi * (lambda * t * t + x * x)) * root;
}

RectTransform rect_cauchy_C(double lambda, double t) {
  check_lambda(lambda);
  if (!(t > 0.0)) throw InvalidArgument("rect_cauchy: t must be positive");
  // i t sqrt(z) with the cut on [0, inf) equals -t (-z)^{1/2}.
  return RectTransform::closed_form(
      lambda,
      [t](cplx z) -> Jet {
        const cplx r = std::sqrt(-z);
        return {-t * r, t / (2.0 * r)};
      },
      {}, "i t sqrt(z)");
}

CatalogEntry rect_cauchy(double lambda, double t) {
  return {Family::rect_cauchy,
          lambda,
          {{"t", t}},
          [lambda, t](double x) { return rect_cauchy_density(lambda, t, x); },
          rect_cauchy_support(lambda, t),
          rect_cauchy_C(lambda, t),
          "t / (pi (lambda t^2 + x^2)) [1 - t^2 (lambda-1)^2 / (4 x^2)]^(1/2) for |x| > t (1-lambda)/2",
          "i t sqrt(z)"};
}

// --- stable and Poisson analogues ----------------------------------------

RectTransform rect_stable_C(double lambda, double alpha, double scale) {
  check_lambda(lambda);
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("rect_stable: alpha must lie in (0, 2]");
  if (!(scale > 0.0)) throw InvalidArgument("rect_stable: scale must be positive");
  std::vector<double> head;
  if (alpha == 2.0) {
    head.assign(kHeadOrder, 0.0);
    head[0] = scale;
  }
  const double a = alpha / 2.0;
  return RectTransform::closed_form(
      lambda,
      [a, scale](cplx z) -> Jet {
        const cplx base = -z;
        const cplx p = std::pow(base, a);
        return {-scale * p, scale * a * p / base};
      },
      std::move(head), "-C (-z)^(alpha/2)");
}

CatalogEntry rect_stable(double lambda, double alpha, double scale) {
  return {Family::rect_stable,
          lambda,
          {{"alpha", alpha}, {"C", scale}},
          std::nullopt,
          {},
          rect_stable_C(lambda, alpha, scale),
          "unknown in closed form; numeric densities via recover_measure are derived, not closed-form",
          "-C (-z)^(alpha/2)",
          false};
}

RectTransform rect_poisson_C(double lambda, double c) {
  check_lambda(lambda);
  if (!(c > 0.0)) throw InvalidArgument("rect_poisson: c must be positive");
  return RectTransform::closed_form(
      lambda,
      [c](cplx z) -> Jet {
        const cplx d = 1.0 - z;
        return {c * z / d, c / (d * d)};
      },
      std::vector<double>(kHeadOrder, c), "c z / (1 - z)");
}

CatalogEntry rect_poisson(double lambda, double c) {
  return {Family::rect_poisson,
          lambda,
          {{"c", c}},
          std::nullopt,
          {},
          rect_poisson_C(lambda, c),
          "unknown in closed form; numeric densities via recover_measure are derived, not closed-form",
          "c z / (1 - z)",
          false};
}

std::vector<CatalogEntry> catalog(double lambda) {
  std::vector<CatalogEntry> out;
  if (lambda > 0.0) {
    out.push_back(bernoulli_conv(lambda));
    out.push_back(rect_gaussian(lambda, 1.0));
  }
  out.push_back(rect_cauchy(lambda, 0.5));
  out.push_back(rect_stable(lambda, 1.5, 1.0));
  out.push_back(rect_poisson(lambda, 1.0));
  return out;
}

nlohmann::json catalog_json(double lambda) {
  nlohmann::json families = nlohmann::json::array();
  for (const auto& e : catalog(lambda)) {
    nlohmann::json j;
    j["family"] = family_name(e.family);
    j["lambda"] = e.lambda;
    j["parameters"] = e.parameters;
    j["transform"] = e.transform_formula;
    j["density"] = e.density_formula;
    j["density_known"] = e.density_known;
    nlohmann::json sup = nlohmann::json::array();
    for (const auto& iv : e.support) {
      // JSON has no infinity; an open upper end is written as null.
      sup.push_back({iv.lo, std::isinf(iv.hi) ? nlohmann::json(nullptr) : nlohmann::json(iv.hi)});
    }
    j["support_positive_side"] = sup;
    j["symmetric"] = true;
    families.push_back(std::move(j));
  }
  return {{"lambda", lambda}, {"families", families}};
}

}  // namespace rectfree::closedforms
