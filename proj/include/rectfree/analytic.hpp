#pragma once

// The analytic transform chain
//   mu -> G_mu -> H_mu(z) = lambda G(1/sqrt z)^2 + (1-lambda) sqrt z G(1/sqrt z)
//      -> C_mu(z) = U(z / H_mu^{-1}(z) - 1)
// and the way back from C to mu by Stieltjes inversion.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rectfree/measure.hpp"

namespace rectfree::analytic {

/// Value and first derivative of an analytic function at a point.
struct Jet {
  cplx value;
  cplx derivative;
};

using AnalyticFn = std::function<Jet(cplx)>;

/// sqrt with its cut on [0, inf), sqrt(-1) = i. Rejects points on the cut.
cplx sqrt_cut_pos(cplx z);
/// sqrt with its cut on (-inf, 0], 1^{1/2} = 1. Rejects points on the cut.
cplx sqrt_cut_neg(cplx z);

/// T(x) = (lambda x + 1)(x + 1).
Jet T_eval(double lambda, cplx x);
/// U = (T - 1)^{-1} near 0; U(z) = z at lambda = 0.
Jet U_eval(double lambda, cplx z);
/// V(h) = U(h - 1) + 1 solves h = lambda g^2 + (1 - lambda) g for g near 1.
Jet V_eval(double lambda, cplx h);

/// H_mu and H_mu'; z must be off [0, inf).
Jet H_eval(const SymmetricMeasure& mu, double lambda, cplx z);

/// Same as H_eval without the cut check; used by the continuations, which only
/// ever approach the positive axis from off it.
Jet H_jet(const SymmetricMeasure& mu, double lambda, cplx z);

struct InverseOptions {
  double tolerance = 1e-13;  // relative residual |h(x) - y| / |y|
  int max_newton = 60;
  double certified_beta = 0.0;  // reported in DomainError
};

/// Solves h(x) = y with h(x) ~ x near 0. Real negative y: Newton from the seed
/// y, with a geometric continuation from y/1000 when the direct iteration
/// fails. Complex y: solve at -|y| first, then follow the arc to arg y.
cplx H_inverse(const AnalyticFn& h, cplx y, const InverseOptions& options = {});

/// Largest beta <= beta_max such that h is strictly increasing at 256 samples
/// of [-beta, 0) and Newton from the seed y recovers each sample.
double certify_beta(const AnalyticFn& h, double beta_max);

/// An evaluable rectangular R-transform: ratio, series head c_2..c_{2N} and an
/// evaluator on Delta_{alpha,beta} and beyond by analytic continuation.
class RectTransform {
 public:
  /// Stateful evaluator for a continuation path: each call may warm-start from
  /// the previous one. Not shared between threads.
  class Tracker {
   public:
    virtual ~Tracker() = default;
    virtual Jet eval(cplx z) = 0;
  };

  class Node {
   public:
    virtual ~Node() = default;
    virtual std::unique_ptr<Tracker> make_tracker() const = 0;
  };

  RectTransform(double lambda, std::shared_ptr<const Node> node, std::vector<double> series_head,
                double certified_beta, std::string description);

  /// Closed-form transform; jet must be analytic on C \ [0, inf).
  static RectTransform closed_form(double lambda, AnalyticFn jet, std::vector<double> series_head,
                                   std::string description);

  /// C_mu computed through H_mu^{-1}. Series head from the moments when mu is
  /// bounded. Throws for moment sequences.
  static RectTransform from_measure(const SymmetricMeasure& mu, double lambda, int order = 12);

  double lambda() const { return lambda_; }
  double certified_beta() const { return certified_beta_; }
  const std::vector<double>& series_head() const { return series_head_; }
  const std::string& description() const { return description_; }

  Jet eval(cplx z) const { return tracker()->eval(z); }
  std::unique_ptr<Tracker> tracker() const { return node_->make_tracker(); }

  /// Pointwise sum (same lambda); the transform of the rectangular convolution.
  friend RectTransform operator+(const RectTransform& a, const RectTransform& b);
  friend RectTransform operator*(double c, const RectTransform& a);

 private:
  double lambda_;
  std::shared_ptr<const Node> node_;
  std::vector<double> series_head_;
  double certified_beta_;
  std::string description_;
};

/// C_mu(z).
cplx C_eval(const SymmetricMeasure& mu, double lambda, cplx z);

struct RecoveryOptions {
  std::vector<double> eps_schedule{1e-2, 5e-3, 2.5e-3};
  double start_height = 1e3;     // path starts at w = x - i start_height
  double steps_per_decade = 16;
  double residual_threshold = 0.05;
};

struct Recovery {
  SymmetricMeasure measure;
  std::vector<double> x;        // nonnegative abscissae, ascending
  std::vector<double> density;  // clipped at 0
  double min_raw_density = 0.0;
  double atom0 = 0.0;           // max(residual, 0)
  double residual = 0.0;        // 1 - integral of the recovered density
  double certified_beta = 0.0;
  bool flagged = false;         // |residual| above the threshold
};

/// Im G(x - i eps) / pi from C alone at one abscissa, for each eps in the schedule.
std::vector<double> stieltjes_samples(const RectTransform& c, double x, const RecoveryOptions& options);

/// Density of the measure whose transform is c, on |x_grid|. The Stieltjes
/// samples are extrapolated to eps = 0 by Richardson (Neville) in eps.
Recovery recover_measure(const RectTransform& c, const std::vector<double>& x_grid,
                         const RecoveryOptions& options = {});

}  // namespace rectfree::analytic
