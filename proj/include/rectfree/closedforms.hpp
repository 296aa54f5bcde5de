#pragma once

// Closed-form families: the Bernoulli self-convolution and the rectangular
// analogues of the Gaussian, Cauchy, stable and Poisson laws.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rectfree/analytic.hpp"
#include "rectfree/measure.hpp"

namespace rectfree::closedforms {

enum class Family { bernoulli_conv, rect_gaussian, rect_cauchy, rect_stable, rect_poisson };

std::string family_name(Family f);

struct CatalogEntry {
  Family family;
  double lambda;
  std::map<std::string, double> parameters;
  std::optional<std::function<double(double)>> density;  // even, on R
  std::vector<Interval> support;                          // positive side
  analytic::RectTransform transform;
  std::string density_formula;
  std::string transform_formula;
  bool density_known = true;  // false: only numeric densities via recovery exist

  /// Grid discretization of the density (throws when none is known).
  SymmetricMeasure to_measure(int nodes_per_interval = 2000) const;
};

// (delta_{-1} + delta_1)/2 and its self-convolution.
double bernoulli_conv_kappa(double lambda);
std::vector<Interval> bernoulli_conv_support(double lambda);
double bernoulli_conv_density(double lambda, double x);
analytic::RectTransform bernoulli_C(double lambda);
analytic::RectTransform bernoulli_conv_C(double lambda);
CatalogEntry bernoulli_conv(double lambda);

std::vector<Interval> rect_gaussian_support(double lambda, double sigma2);
double rect_gaussian_density(double lambda, double sigma2, double x);
analytic::RectTransform rect_gaussian_C(double lambda, double sigma2);
CatalogEntry rect_gaussian(double lambda, double sigma2);

std::vector<Interval> rect_cauchy_support(double lambda, double t);
double rect_cauchy_density(double lambda, double t, double x);
analytic::RectTransform rect_cauchy_C(double lambda, double t);
CatalogEntry rect_cauchy(double lambda, double t);

/// z -> -scale (-z)^{alpha/2}, principal power.
analytic::RectTransform rect_stable_C(double lambda, double alpha, double scale);
CatalogEntry rect_stable(double lambda, double alpha, double scale);

/// z -> c z / (1 - z).
analytic::RectTransform rect_poisson_C(double lambda, double c);
CatalogEntry rect_poisson(double lambda, double c);

/// One entry per family at default parameters.
std::vector<CatalogEntry> catalog(double lambda);

nlohmann::json catalog_json(double lambda);

}  // namespace rectfree::closedforms
