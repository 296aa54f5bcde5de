#pragma once

// Symmetric probability measures on the real line in three representations,
// and measures on the half-line used by the square push-forward.
//
// Atomic and grid measures both reduce to a half-line quadrature
//   mu = sum_i p_i (delta_{r_i} + delta_{-r_i}) / 2   (r_i >= 0),
// stored as s_i = r_i^2 and p_i; an atom at 0 is the node s = 0. All analytic
// transforms go through K(u) = sum_i p_i / (1 - s_i u) = int dmu(t) / (1 - t^2 u).

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rectfree/kernels.hpp"

namespace rectfree {

using cplx = std::complex<double>;

inline constexpr double kMassTolerance = 1e-8;

struct Atom {
  double location;
  double weight;
};

struct Interval {
  double lo;
  double hi;  // may be +infinity
};

/// Even density sampled at nonnegative nodes. weights are one-sided dx
/// quadrature weights, so the mass of the absolutely continuous part is
/// 2 sum_i density_i weights_i.
struct GridDensity {
  std::vector<Interval> support;  // positive side
  std::vector<double> x;
  std::vector<double> density;
  std::vector<double> weights;
  double atom0 = 0.0;
};

struct AtomicLaw {
  std::vector<Atom> atoms;  // closed under x -> -x with equal weights
};

struct MomentSeq {
  std::vector<double> even_moments;  // m_2, m_4, ...
  double support_radius = std::numeric_limits<double>::infinity();
};

class SymmetricMeasure {
 public:
  using Representation = std::variant<AtomicLaw, GridDensity, MomentSeq>;

  static SymmetricMeasure atomic(std::vector<Atom> atoms);
  /// Atoms given on [0, inf): weight w at r > 0 becomes w/2 at +r and -r.
  static SymmetricMeasure from_half_line_atoms(const std::vector<Atom>& atoms);
  static SymmetricMeasure dirac0();
  static SymmetricMeasure bernoulli(double c = 1.0);

  static SymmetricMeasure grid(GridDensity g, double mass_tolerance = kMassTolerance);
  /// Trapezoid weights on the given nonnegative nodes.
  static SymmetricMeasure grid_from_samples(std::vector<double> x, std::vector<double> density,
                                            double atom0 = 0.0,
                                            double mass_tolerance = kMassTolerance);
  /// Samples an even density on positive-side intervals. Finite intervals use a
  /// cosine map (clusters nodes at the edges, integrates inverse-square-root
  /// edges); [a, inf) uses x = a + scale tan(theta). Weights are rescaled so the
  /// total mass is exactly one once the raw quadrature is within 1e-6 of it.
  static SymmetricMeasure grid_from_function(const std::vector<Interval>& support,
                                             const std::function<double(double)>& density,
                                             int nodes_per_interval, double atom0 = 0.0,
                                             double tail_scale = 1.0);

  static SymmetricMeasure from_moments(std::vector<double> even_moments,
                                       double support_radius = std::numeric_limits<double>::infinity());

  const Representation& representation() const { return rep_; }
  bool is_atomic() const { return std::holds_alternative<AtomicLaw>(rep_); }
  bool is_grid() const { return std::holds_alternative<GridDensity>(rep_); }
  bool is_moment_sequence() const { return std::holds_alternative<MomentSeq>(rep_); }

  /// Atomic or grid: the transforms below are available.
  bool evaluable() const { return !is_moment_sequence(); }

  /// Largest |x| in the support (infinity for heavy tails / unknown).
  double support_radius() const;
  bool bounded() const { return support_radius() < std::numeric_limits<double>::infinity(); }

  /// Half-line quadrature (s_i = r_i^2, p_i).
  std::span<const double> squared_nodes() const { return s_; }
  std::span<const double> masses() const { return p_; }

  /// K(u) and K'(u). Throws for moment sequences.
  kernels::ResolventSums resolvent(cplx u) const;

  /// Density of the absolutely continuous part at x (linear interpolation on
  /// grids, 0 for atomic laws).
  double density(double x) const;

 private:
  explicit SymmetricMeasure(Representation rep);
  void build_quadrature();

  Representation rep_;
  std::vector<double> s_;
  std::vector<double> p_;
};

/// A probability measure on [0, inf): atoms and/or a sampled density with
/// explicit dx weights.
struct HalfLineMeasure {
  std::vector<Atom> atoms;
  std::vector<double> x;
  std::vector<double> density;
  std::vector<double> weights;

  double mass() const;
};

/// nu~(B) = (nu(B) + nu(-B)) / 2.
SymmetricMeasure symmetrize(const HalfLineMeasure& nu);

/// Law of X^2 for X ~ mu.
HalfLineMeasure pushforward_square(const SymmetricMeasure& mu);

/// Symmetric law whose square is rho (inverse of pushforward_square).
SymmetricMeasure pullback_sqrt(const HalfLineMeasure& rho);

/// m_2, m_4, ..., m_{2 n_max}.
std::vector<double> moments(const SymmetricMeasure& mu, int n_max);

/// G(z) = int dmu(t) / (z - t), Im z != 0.
cplx cauchy_transform(const SymmetricMeasure& mu, cplx z);

/// G'(z).
cplx cauchy_transform_derivative(const SymmetricMeasure& mu, cplx z);

/// The 64 evaluation points of weak_distance (Im z = 1).
std::vector<cplx> weak_distance_grid();

/// sup over weak_distance_grid() of |G_1(z) - G_2(z)|.
double weak_distance(const SymmetricMeasure& a, const SymmetricMeasure& b);

/// count quantiles of |X| at levels (j + 1/2) / count, ascending.
std::vector<double> abs_quantiles(const SymmetricMeasure& mu, int count);

/// Mass check helper shared by the constructors.
void check_mass(double mass, double tolerance, const char* who);

}  // namespace rectfree
