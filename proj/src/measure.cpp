#include "rectfree/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "rectfree/error.hpp"

namespace rectfree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Merges atoms by location, dropping zero weights.
std::map<double, double> merge_atoms(const std::vector<Atom>& atoms) {
  std::map<double, double> merged;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.location))
      throw InvalidArgument("atoms need finite locations and nonnegative weights");
    if (a.weight > 0.0) merged[a.location == 0.0 ? 0.0 : a.location] += a.weight;
  }
  return merged;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += h / 2;
    w[i + 1] += h / 2;
  }
  return w;
}

void check_grid_shape(const std::vector<double>& x, const std::vector<double>& density,
                      const std::vector<double>& weights, const char* who) {
  if (x.empty()) throw InvalidArgument(std::string(who) + ": empty grid");
  if (x.size() != density.size() || x.size() != weights.size())
    throw InvalidArgument(std::string(who) + ": x, density and weights differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) throw InvalidArgument(std::string(who) + ": grid nodes must be >= 0");
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidArgument(std::string(who) + ": nodes must increase");
    if (!(density[i] >= 0.0)) throw InvalidArgument(std::string(who) + ": negative density");
    if (!(weights[i] >= 0.0)) throw InvalidArgument(std::string(who) + ": negative weight");
  }
}

double grid_mass(const GridDensity& g) {
  double m = g.atom0;
  for (std::size_t i = 0; i < g.x.size(); ++i) m += 2.0 * g.density[i] * g.weights[i];
  return m;
}

}  // namespace

void check_mass(double mass, double tolerance, const char* who) {
  if (!(std::abs(mass - 1.0) <= tolerance))
    throw InvalidArgument(std::string(who) + ": total mass " + std::to_string(mass) + " is not 1");
}

SymmetricMeasure::SymmetricMeasure(Representation rep) : rep_(std::move(rep)) { build_quadrature(); }

void SymmetricMeasure::build_quadrature() {
  s_.clear();
  p_.clear();
  if (const auto* a = std::get_if<AtomicLaw>(&rep_)) {
    for (const auto& atom : a->atoms) {
      if (atom.location < 0.0) continue;
      s_.push_back(atom.location * atom.location);
      p_.push_back(atom.location == 0.0 ? atom.weight : 2.0 * atom.weight);
    }
  } else if (const auto* g = std::get_if<GridDensity>(&rep_)) {
    if (g->atom0 > 0.0) {
      s_.push_back(0.0);
      p_.push_back(g->atom0);
    }
    for (std::size_t i = 0; i < g->x.size(); ++i) {
      const double m = 2.0 * g->density[i] * g->weights[i];
      if (m == 0.0) continue;
      s_.push_back(g->x[i] * g->x[i]);
      p_.push_back(m);
    }
  }
}

SymmetricMeasure SymmetricMeasure::atomic(std::vector<Atom> atoms) {
  const auto merged = merge_atoms(atoms);
  double mass = 0.0;
  for (const auto& [x, w] : merged) {
    mass += w;
    if (x > 0.0) {
      auto it = merged.find(-x);
      if (it == merged.end() || std::abs(it->second - w) > 1e-12)
        throw InvalidArgument("atomic measure is not symmetric");
    } else if (x < 0.0 && merged.find(-x) == merged.end()) {
      throw InvalidArgument("atomic measure is not symmetric");
    }
  }
  check_mass(mass, kMassTolerance, "atomic measure");
  AtomicLaw law;
  for (const auto& [x, w] : merged) law.atoms.push_back({x, w});
  return SymmetricMeasure(std::move(law));
}

SymmetricMeasure SymmetricMeasure::from_half_line_atoms(const std::vector<Atom>& atoms) {
  std::vector<Atom> full;
  for (const auto& a : atoms) {
    if (a.location < 0.0) throw InvalidArgument("from_half_line_atoms: negative location");
    if (a.location == 0.0) {
      full.push_back(a);
    } else {
      full.push_back({a.location, a.weight / 2});
      full.push_back({-a.location, a.weight / 2});
    }
  }
  return atomic(std::move(full));
}

SymmetricMeasure SymmetricMeasure::dirac0() { return atomic({{0.0, 1.0}}); }

SymmetricMeasure SymmetricMeasure::bernoulli(double c) {
  if (!(c > 0.0)) throw InvalidArgument("bernoulli: c must be positive");
  return atomic({{-c, 0.5}, {c, 0.5}});
}

SymmetricMeasure SymmetricMeasure::grid(GridDensity g, double mass_tolerance) {
  check_grid_shape(g.x, g.density, g.weights, "grid measure");
  if (!(g.atom0 >= 0.0)) throw InvalidArgument("grid measure: negative atom at 0");
  check_mass(grid_mass(g), mass_tolerance, "grid measure");
  if (g.support.empty()) g.support.push_back({g.x.front(), g.x.back()});
  return SymmetricMeasure(std::move(g));
}

SymmetricMeasure SymmetricMeasure::grid_from_samples(std::vector<double> x, std::vector<double> density,
                                                     double atom0, double mass_tolerance) {
  GridDensity g;
  g.weights = trapezoid_weights(x);
  g.x = std::move(x);
  g.density = std::move(density);
  g.atom0 = atom0;
  return grid(std::move(g), mass_tolerance);
}

SymmetricMeasure SymmetricMeasure::grid_from_function(const std::vector<Interval>& support,
                                                      const std::function<double(double)>& density,
                                                      int nodes_per_interval, double atom0,
                                                      double tail_scale) {
  if (support.empty()) throw InvalidArgument("grid_from_function: empty support");
  if (nodes_per_interval < 2) throw InvalidArgument("grid_from_function: too few nodes");
  GridDensity g;
  g.support = support;
  g.atom0 = atom0;
  const int n = nodes_per_interval;
  for (const auto& iv : support) {
    if (!(iv.lo >= 0.0) || !(iv.hi > iv.lo))
      throw InvalidArgument("grid_from_function: intervals must satisfy 0 <= lo < hi");
    if (!g.x.empty() && iv.lo < g.x.back())
      throw InvalidArgument("grid_from_function: intervals must be sorted and disjoint");
    for (int j = 0; j < n; ++j) {
      double x, w;
      if (std::isinf(iv.hi)) {
        const double h = std::numbers::pi / 2 / n;
        const double t = (j + 0.5) * h;
        const double sec2 = 1.0 / (std::cos(t) * std::cos(t));
        if (iv.lo > 0.0) {
          // x - lo = scale tan^2: square-root edges at lo become smooth.
          x = iv.lo + tail_scale * std::tan(t) * std::tan(t);
          w = 2.0 * tail_scale * std::tan(t) * sec2 * h;
        } else {
          x = tail_scale * std::tan(t);
          w = tail_scale * sec2 * h;
        }
      } else {
        const double h = std::numbers::pi / n;
        const double t = (j + 0.5) * h;
        x = iv.lo + (iv.hi - iv.lo) * (1.0 - std::cos(t)) / 2;
        w = (iv.hi - iv.lo) / 2 * std::sin(t) * h;
      }
      const double f = density(x);
      if (!(f >= 0.0)) throw InvalidArgument("grid_from_function: density is negative or NaN");
      g.x.push_back(x);
      g.density.push_back(f);
      g.weights.push_back(w);
    }
  }
  const double raw = grid_mass(g);
  check_mass(raw, 1e-6, "grid_from_function");
  const double ac = raw - atom0;
  if (ac > 0.0)
    for (auto& w : g.weights) w *= (1.0 - atom0) / ac;
  return grid(std::move(g));
}

SymmetricMeasure SymmetricMeasure::from_moments(std::vector<double> even_moments, double support_radius) {
  for (double m : even_moments)
    if (!std::isfinite(m) || m < 0.0) throw InvalidArgument("moment sequence: even moments must be finite and >= 0");
  return SymmetricMeasure(MomentSeq{std::move(even_moments), support_radius});
}

double SymmetricMeasure::support_radius() const {
  if (const auto* a = std::get_if<AtomicLaw>(&rep_)) {
    double r = 0.0;
    for (const auto& atom : a->atoms) r = std::max(r, std::abs(atom.location));
    return r;
  }
  if (const auto* g = std::get_if<GridDensity>(&rep_)) {
    double r = 0.0;
    for (const auto& iv : g->support) r = std::max(r, iv.hi);
    return r;
  }
  return std::get<MomentSeq>(rep_).support_radius;
}

kernels::ResolventSums SymmetricMeasure::resolvent(cplx u) const {
  if (!evaluable()) throw InvalidArgument("moment-sequence measures have no Cauchy transform");
  return kernels::resolvent_sums(s_, p_, u);
}

double SymmetricMeasure::density(double x) const {
  const auto* g = std::get_if<GridDensity>(&rep_);
  if (g == nullptr) return 0.0;
  const double ax = std::abs(x);
  const bool inside = std::any_of(g->support.begin(), g->support.end(),
                                  [&](const Interval& iv) { return ax >= iv.lo && ax <= iv.hi; });
  if (!inside) return 0.0;
  const auto& xs = g->x;
  auto it = std::lower_bound(xs.begin(), xs.end(), ax);
  if (it == xs.begin()) return g->density.front();
  if (it == xs.end()) return g->density.back();
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (ax - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1 - t) * g->density[i - 1] + t * g->density[i];
}

double HalfLineMeasure::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight;
  for (std::size_t i = 0; i < x.size(); ++i) m += density[i] * weights[i];
  return m;
}

SymmetricMeasure symmetrize(const HalfLineMeasure& nu) {
  for (const auto& a : nu.atoms)
    if (a.location < 0.0) throw InvalidArgument("symmetrize: atom on the negative half-line");
  check_mass(nu.mass(), kMassTolerance, "symmetrize");
  if (nu.x.empty()) return SymmetricMeasure::from_half_line_atoms(nu.atoms);
  check_grid_shape(nu.x, nu.density, nu.weights, "symmetrize");
  GridDensity g;
  for (const auto& a : nu.atoms) {
    if (a.location != 0.0 && a.weight > 0.0)
      throw InvalidArgument("symmetrize: atoms away from 0 next to a density are not representable");
    g.atom0 += a.weight;
  }
  g.x = nu.x;
  g.weights = nu.weights;
  g.density.reserve(nu.density.size());
  for (double f : nu.density) g.density.push_back(f / 2);
  return SymmetricMeasure::grid(std::move(g));
}

HalfLineMeasure pushforward_square(const SymmetricMeasure& mu) {
  HalfLineMeasure rho;
  if (const auto* a = std::get_if<AtomicLaw>(&mu.representation())) {
    std::map<double, double> merged;
    for (const auto& atom : a->atoms) merged[atom.location * atom.location] += atom.weight;
    for (const auto& [y, w] : merged) rho.atoms.push_back({y, w});
    return rho;
  }
  const auto* g = std::get_if<GridDensity>(&mu.representation());
  if (g == nullptr) throw InvalidArgument("pushforward_square: moment sequences carry no law");
  if (g->atom0 > 0.0) rho.atoms.push_back({0.0, g->atom0});
  for (std::size_t i = 0; i < g->x.size(); ++i) {
    const double x = g->x[i];
    // rho(y) = f(sqrt y) / sqrt y, dy = 2 x dx. A node at 0 keeps its mass element 2 f w.
    rho.x.push_back(x * x);
    rho.density.push_back(x > 0.0 ? g->density[i] / x : g->density[i]);
    rho.weights.push_back(x > 0.0 ? 2.0 * x * g->weights[i] : 2.0 * g->weights[i]);
  }
  return rho;
}

SymmetricMeasure pullback_sqrt(const HalfLineMeasure& rho) {
  for (const auto& a : rho.atoms)
    if (a.location < 0.0) throw InvalidArgument("pullback_sqrt: negative support");
  if (!rho.x.empty() && rho.x.front() < 0.0) throw InvalidArgument("pullback_sqrt: negative support");
  check_mass(rho.mass(), kMassTolerance, "pullback_sqrt");
  if (rho.x.empty()) {
    std::vector<Atom> half;
    for (const auto& a : rho.atoms) half.push_back({std::sqrt(a.location), a.weight});
    return SymmetricMeasure::from_half_line_atoms(half);
  }
  check_grid_shape(rho.x, rho.density, rho.weights, "pullback_sqrt");
  GridDensity g;
  for (const auto& a : rho.atoms) {
    if (a.location != 0.0 && a.weight > 0.0)
      throw InvalidArgument("pullback_sqrt: atoms away from 0 next to a density are not representable");
    g.atom0 += a.weight;
  }
  for (std::size_t i = 0; i < rho.x.size(); ++i) {
    const double x = std::sqrt(rho.x[i]);
    g.x.push_back(x);
    g.density.push_back(x > 0.0 ? rho.density[i] * x : rho.density[i]);
    g.weights.push_back(x > 0.0 ? rho.weights[i] / (2.0 * x) : rho.weights[i] / 2.0);
  }
  return SymmetricMeasure::grid(std::move(g));
}

std::vector<double> moments(const SymmetricMeasure& mu, int n_max) {
  if (n_max < 0) throw InvalidArgument("moments: negative order");
  if (const auto* m = std::get_if<MomentSeq>(&mu.representation())) {
    if (n_max > static_cast<int>(m->even_moments.size()))
      throw InvalidArgument("moments: requested order " + std::to_string(2 * n_max) +
                            " beyond the stored moment sequence");
    return {m->even_moments.begin(), m->even_moments.begin() + n_max};
  }
  if (!mu.bounded()) throw InvalidArgument("moments: unbounded support, moments are infinite");
  std::vector<double> out(n_max, 0.0);
  kernels::power_sums(mu.squared_nodes(), mu.masses(), out);
  return out;
}

cplx cauchy_transform(const SymmetricMeasure& mu, cplx z) {
  if (z.imag() == 0.0) throw InvalidArgument("cauchy_transform: z must be off the real axis");
  return mu.resolvent(1.0 / (z * z)).value / z;
}

cplx cauchy_transform_derivative(const SymmetricMeasure& mu, cplx z) {
  if (z.imag() == 0.0) throw InvalidArgument("cauchy_transform: z must be off the real axis");
  const auto k = mu.resolvent(1.0 / (z * z));
  const cplx z2 = z * z;
  return -k.value / z2 - 2.0 * k.derivative / (z2 * z2);
}

std::vector<cplx> weak_distance_grid() {
  std::vector<cplx> grid;
  constexpr int kHalf = 32;
  const double lo = std::log(1e-2), hi = std::log(50.0);
  for (int j = 0; j < kHalf; ++j) {
    const double x = std::exp(lo + (hi - lo) * j / (kHalf - 1));
    grid.emplace_back(-x, 1.0);
    grid.emplace_back(x, 1.0);
  }
  std::sort(grid.begin(), grid.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return grid;
}

double weak_distance(const SymmetricMeasure& a, const SymmetricMeasure& b) {
  double d = 0.0;
  for (cplx z : weak_distance_grid()) d = std::max(d, std::abs(cauchy_transform(a, z) - cauchy_transform(b, z)));
  return d;
}

std::vector<double> abs_quantiles(const SymmetricMeasure& mu, int count) {
  if (count < 1) throw InvalidArgument("abs_quantiles: count must be positive");
  // Law of |X| as cells [lo, hi] carrying mass uniformly (atoms have lo == hi).
  struct Cell {
    double lo, hi, mass;
  };
  std::vector<Cell> cells;
  if (const auto* a = std::get_if<AtomicLaw>(&mu.representation())) {
    std::map<double, double> merged;
    for (const auto& atom : a->atoms) merged[std::abs(atom.location)] += atom.weight;
    for (const auto& [r, w] : merged) cells.push_back({r, r, w});
  } else if (const auto* g = std::get_if<GridDensity>(&mu.representation())) {
    if (g->atom0 > 0.0) cells.push_back({0.0, 0.0, g->atom0});
    const auto& x = g->x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo = i == 0 ? std::max(0.0, x[0] - (x.size() > 1 ? (x[1] - x[0]) / 2 : 0.0))
                               : (x[i - 1] + x[i]) / 2;
      const double hi = i + 1 == x.size() ? x[i] + (x.size() > 1 ? (x[i] - x[i - 1]) / 2 : 0.0)
                                          : (x[i] + x[i + 1]) / 2;
      cells.push_back({lo, hi, 2.0 * g->density[i] * g->weights[i]});
    }
  } else {
    throw InvalidArgument("abs_quantiles: moment sequences carry no law");
  }
  std::vector<double> out;
  out.reserve(count);
  std::size_t c = 0;
  double below = 0.0;  // mass of cells before c
  for (int j = 0; j < count; ++j) {
    const double level = (j + 0.5) / count;
    while (c + 1 < cells.size() && below + cells[c].mass < level) below += cells[c++].mass;
    const Cell& cell = cells[c];
    const double t = cell.mass > 0.0 ? std::clamp((level - below) / cell.mass, 0.0, 1.0) : 0.0;
    out.push_back(cell.lo + t * (cell.hi - cell.lo));
  }
  return out;
}

}  // namespace rectfree
