#include "rectfree/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rectfree/error.hpp"
#include "rectfree/parallel.hpp"
#include "rectfree/series.hpp"

namespace rectfree::analytic {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Newton on h(x) = target from x0. Converged when the residual is below
// tol * max(|target|, tiny).
bool newton(const AnalyticFn& h, cplx x0, cplx target, double tol, int max_iter, cplx& out) {
  cplx x = x0;
  const double scale = std::max(std::abs(target), 1e-300);
  for (int it = 0; it < max_iter; ++it) {
    const Jet j = h(x);
    const cplx r = j.value - target;
    if (!finite(r)) return false;
    if (std::abs(r) <= tol * scale) {
      out = x;
      return true;
    }
    if (j.derivative == cplx(0.0)) return false;
    const cplx step = r / j.derivative;
    x -= step;
    if (!finite(x)) return false;
    if (std::abs(step) <= 1e-16 * std::abs(x)) {
      const Jet k = h(x);
      if (std::abs(k.value - target) <= 1e3 * tol * scale) {
        out = x;
        return true;
      }
      return false;
    }
  }
  return false;
}

// Follows the solution of h(x) = target(t) for t in [0, 1] from x(0) = x0,
// halving the step on failure.
bool follow(const AnalyticFn& h, const std::function<cplx(double)>& target, cplx x0, int steps,
            double tol, int max_iter, cplx& out) {
  double t = 0.0;
  double dt = 1.0 / steps;
  cplx x = x0;
  int halvings = 0;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    const cplx y_prev = target(t);
    const cplx y_next = target(t_next);
    // Secant-free predictor: rescale by the target ratio (h(x) ~ x near 0).
    const cplx seed = (y_prev != cplx(0.0)) ? x * (y_next / y_prev) : y_next;
    cplx sol;
    if (newton(h, seed, y_next, tol, max_iter, sol) && std::abs(sol - x) <= 0.5 * std::abs(x) + std::abs(y_next - y_prev) * 4) {
      x = sol;
      t = t_next;
      dt = std::min(dt * 1.5, 1.0 / steps);
      continue;
    }
    if (++halvings > 40) return false;
    dt /= 2;
  }
  out = x;
  return true;
}

cplx principal_sqrt(cplx z) { return std::sqrt(z); }

}  // namespace

cplx sqrt_cut_pos(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw InvalidArgument("sqrt_cut_pos: z on the cut [0, inf)");
  return cplx(0.0, 1.0) * std::sqrt(-z);
}

cplx sqrt_cut_neg(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0) throw InvalidArgument("sqrt_cut_neg: z on the cut (-inf, 0]");
  return std::sqrt(z);
}

Jet T_eval(double lambda, cplx x) {
  return {(lambda * x + 1.0) * (x + 1.0), 2.0 * lambda * x + lambda + 1.0};
}

Jet U_eval(double lambda, cplx z) {
  if (lambda == 0.0) return {z, 1.0};
  // Rationalized root of lambda u^2 + (lambda+1) u - z = 0 that vanishes at 0.
  const cplx root = principal_sqrt((lambda + 1.0) * (lambda + 1.0) + 4.0 * lambda * z);
  return {2.0 * z / ((lambda + 1.0) + root), 1.0 / root};
}

Jet V_eval(double lambda, cplx h) {
  if (lambda == 0.0) return {h, 1.0};
  const Jet u = U_eval(lambda, h - 1.0);
  return {u.value + 1.0, u.derivative};
}

Jet H_jet(const SymmetricMeasure& mu, double lambda, cplx z) {
  // sqrt z G(1/sqrt z) = z K(z), K(z) = int dmu(t) / (1 - t^2 z).
  const auto k = mu.resolvent(z);
  const cplx a = lambda * k.value + (1.0 - lambda);
  return {z * k.value * a, a * (k.value + z * k.derivative) + lambda * z * k.value * k.derivative};
}

Jet H_eval(const SymmetricMeasure& mu, double lambda, cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) throw InvalidArgument("H_eval: z on the cut [0, inf)");
  return H_jet(mu, lambda, z);
}

cplx H_inverse(const AnalyticFn& h, cplx y, const InverseOptions& options) {
  if (y == cplx(0.0)) return 0.0;
  if (y.imag() == 0.0 && y.real() > 0.0) throw InvalidArgument("H_inverse: y on the cut [0, inf)");
  const double tol = options.tolerance;
  const int iters = options.max_newton;
  const double r = std::abs(y);

  cplx x_real;
  if (!newton(h, cplx(-r), cplx(-r), tol, iters, x_real) || x_real.real() >= 0.0) {
    const double start = r * 1e-3;
    cplx x0;
    if (!newton(h, cplx(-start), cplx(-start), tol, iters, x0))
      throw DomainError("H_inverse: Newton does not converge near 0", options.certified_beta);
    auto target = [&](double t) { return cplx(-start * std::pow(1e3, t)); };
    if (!follow(h, target, x0, 48, tol, iters, x_real))
      throw DomainError("H_inverse: continuation along the negative axis failed", options.certified_beta);
  }
  if (y.imag() == 0.0) return cplx(x_real.real(), 0.0);

  const double theta_end = std::arg(y);
  const double theta_start = theta_end > 0 ? std::numbers::pi : -std::numbers::pi;
  auto arc = [&](double t) { return std::polar(r, theta_start + t * (theta_end - theta_start)); };
  const int steps = std::max(8, static_cast<int>(std::ceil(std::abs(theta_end - theta_start) / 0.05)));
  cplx x;
  if (!follow(h, arc, x_real, steps, tol, iters, x))
    throw DomainError("H_inverse: continuation along the arc failed", options.certified_beta);
  return x;
}

double certify_beta(const AnalyticFn& h, double beta_max) {
  constexpr int kSamples = 256;
  auto ok = [&](double beta) {
    double prev = 0.0;
    for (int j = 1; j <= kSamples; ++j) {
      const double x = -beta * j / kSamples;
      const Jet v = h(cplx(x));
      if (!finite(v.value) || std::abs(v.value.imag()) > 1e-12 * std::abs(v.value)) return false;
      if (!(v.value.real() < prev)) return false;
      prev = v.value.real();
      cplx sol;
      if (!newton(h, v.value, v.value, 1e-13, 60, sol)) return false;
      if (std::abs(sol - cplx(x)) > 1e-8 * std::abs(x)) return false;
    }
    return true;
  };
  if (ok(beta_max)) return beta_max;
  double lo = 0.0, hi = beta_max;
  for (int it = 0; it < 24; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// RectTransform nodes

namespace {

class ClosedFormNode final : public RectTransform::Node {
 public:
  explicit ClosedFormNode(AnalyticFn fn) : fn_(std::move(fn)) {}

  std::unique_ptr<RectTransform::Tracker> make_tracker() const override {
    struct T final : RectTransform::Tracker {
      const AnalyticFn* fn;
      Jet eval(cplx z) override { return (*fn)(z); }
    };
    auto t = std::make_unique<T>();
    t->fn = &fn_;
    return t;
  }

 private:
  AnalyticFn fn_;
};

class MeasureNode final : public RectTransform::Node {
 public:
  MeasureNode(SymmetricMeasure mu, double lambda, double beta, double c2)
      : mu_(std::move(mu)), lambda_(lambda), beta_(beta), c2_(c2) {}

  std::unique_ptr<RectTransform::Tracker> make_tracker() const override {
    return std::make_unique<MeasureTracker>(this);
  }

 private:
  class MeasureTracker final : public RectTransform::Tracker {
   public:
    explicit MeasureTracker(const MeasureNode* node) : node_(node) {
      h_ = [node](cplx x) { return H_jet(node->mu_, node->lambda_, x); };
    }

    Jet eval(cplx z) override {
      if (z == cplx(0.0)) return {0.0, node_->c2_};
      const cplx x = preimage(z);
      const Jet hx = h_(x);
      const cplx v = z / x - 1.0;
      const Jet u = U_eval(node_->lambda_, v);
      const cplx dx = 1.0 / hx.derivative;
      return {u.value, u.derivative * (1.0 / x - z * dx / (x * x))};
    }

   private:
    cplx preimage(cplx z) {
      InverseOptions opt;
      opt.certified_beta = node_->beta_;
      cplx x;
      bool done = false;
      if (has_prev_) {
        const cplx z0 = prev_z_;
        auto segment = [&](double t) { return z0 + t * (z - z0); };
        done = follow(h_, segment, prev_x_, 1, opt.tolerance, opt.max_newton, x);
      }
      if (!done) x = H_inverse(h_, z, opt);
      has_prev_ = true;
      prev_z_ = z;
      prev_x_ = x;
      return x;
    }

    const MeasureNode* node_;
    AnalyticFn h_;
    bool has_prev_ = false;
    cplx prev_z_{};
    cplx prev_x_{};
  };

  SymmetricMeasure mu_;
  double lambda_;
  double beta_;
  double c2_;
};

class SumNode final : public RectTransform::Node {
 public:
  explicit SumNode(std::vector<std::pair<double, RectTransform>> terms) : terms_(std::move(terms)) {}

  std::unique_ptr<RectTransform::Tracker> make_tracker() const override {
    struct T final : RectTransform::Tracker {
      std::vector<std::pair<double, std::unique_ptr<RectTransform::Tracker>>> parts;
      Jet eval(cplx z) override {
        Jet out{0.0, 0.0};
        for (auto& [c, t] : parts) {
          const Jet j = t->eval(z);
          out.value += c * j.value;
          out.derivative += c * j.derivative;
        }
        return out;
      }
    };
    auto t = std::make_unique<T>();
    for (const auto& [c, term] : terms_) t->parts.emplace_back(c, term.tracker());
    return t;
  }

 private:
  std::vector<std::pair<double, RectTransform>> terms_;
};

}  // namespace

RectTransform::RectTransform(double lambda, std::shared_ptr<const Node> node,
                             std::vector<double> series_head, double certified_beta,
                             std::string description)
    : lambda_(lambda),
      node_(std::move(node)),
      series_head_(std::move(series_head)),
      certified_beta_(certified_beta),
      description_(std::move(description)) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("RectTransform: lambda must lie in [0, 1]");
}

RectTransform RectTransform::closed_form(double lambda, AnalyticFn jet, std::vector<double> series_head,
                                         std::string description) {
  return RectTransform(lambda, std::make_shared<ClosedFormNode>(std::move(jet)), std::move(series_head),
                       std::numeric_limits<double>::infinity(), std::move(description));
}

RectTransform RectTransform::from_measure(const SymmetricMeasure& mu, double lambda, int order) {
  if (!mu.evaluable()) throw InvalidArgument("from_measure: moment sequences have no analytic transform");
  std::vector<double> head;
  double c2 = 0.0;
  if (mu.bounded()) {
    const auto m = moments(mu, std::max(order, 1));
    c2 = m[0];
    if (order > 0) head = series::cumulants_from_moments<double>(m, lambda, order);
  }
  const double r = mu.support_radius();
  const double beta_max = mu.bounded() ? 16.0 / std::max(r * r, 1e-6) : 1.0;
  const double beta =
      certify_beta([&](cplx x) { return H_jet(mu, lambda, x); }, beta_max);
  return RectTransform(lambda, std::make_shared<MeasureNode>(mu, lambda, beta, c2), std::move(head), beta,
                       "C_mu via H_mu^{-1}");
}

RectTransform operator+(const RectTransform& a, const RectTransform& b) {
  if (a.lambda() != b.lambda()) throw InvalidArgument("RectTransform sum: ratios differ");
  std::vector<double> head(std::min(a.series_head().size(), b.series_head().size()));
  for (std::size_t k = 0; k < head.size(); ++k) head[k] = a.series_head()[k] + b.series_head()[k];
  std::vector<std::pair<double, RectTransform>> terms{{1.0, a}, {1.0, b}};
  return RectTransform(a.lambda(), std::make_shared<SumNode>(std::move(terms)), std::move(head),
                       std::min(a.certified_beta(), b.certified_beta()),
                       "(" + a.description() + ") + (" + b.description() + ")");
}

RectTransform operator*(double c, const RectTransform& a) {
  std::vector<double> head = a.series_head();
  for (auto& h : head) h *= c;
  std::vector<std::pair<double, RectTransform>> terms{{c, a}};
  return RectTransform(a.lambda(), std::make_shared<SumNode>(std::move(terms)), std::move(head),
                       a.certified_beta(), std::to_string(c) + " (" + a.description() + ")");
}

cplx C_eval(const SymmetricMeasure& mu, double lambda, cplx z) {
  return RectTransform::from_measure(mu, lambda, 0).eval(z).value;
}

// ---------------------------------------------------------------------------
// Recovery

std::vector<double> stieltjes_samples(const RectTransform& c, double x, const RecoveryOptions& options) {
  std::vector<double> eps = options.eps_schedule;
  if (eps.empty()) throw InvalidArgument("stieltjes_samples: empty eps schedule");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const double lambda = c.lambda();
  const double ax = std::max(std::abs(x), 1e-9);
  auto tracker = c.tracker();

  // Unknown gamma = w G(w) -> 1 as w -> infinity in C^-; with z = 1/w^2 and
  // phi(gamma) = lambda gamma^2 + (1 - lambda) gamma it solves
  //   phi(gamma) = T(C(z phi(gamma))).
  auto solve = [&](cplx w, cplx& gamma) {
    const cplx z = 1.0 / (w * w);
    cplx g = gamma;
    for (int it = 0; it < 60; ++it) {
      const cplx phi = lambda * g * g + (1.0 - lambda) * g;
      const cplx dphi = 2.0 * lambda * g + (1.0 - lambda);
      Jet cj;
      try {
        cj = tracker->eval(z * phi);
      } catch (const DomainError&) {
        return false;
      }
      const Jet tj = T_eval(lambda, cj.value);
      const cplx f = phi - tj.value;
      if (!finite(f)) return false;
      if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(phi))) {
        gamma = g;
        return true;
      }
      const cplx df = dphi * (1.0 - tj.derivative * cj.derivative * z);
      cplx step = f / df;
      if (std::abs(step) > 0.5 * std::abs(g)) step *= 0.5 * std::abs(g) / std::abs(step);
      g -= step;
      if (!finite(g)) return false;
    }
    return false;
  };

  std::vector<double> out;
  out.reserve(eps.size());
  cplx gamma = 1.0;
  double y = std::max(options.start_height, 10.0 * eps.front());
  if (!solve(cplx(ax, -y), gamma)) throw DomainError("stieltjes_samples: no solution at the path start", c.certified_beta());
  cplx gamma_prev = gamma;
  double y_prev = y;
  const double base_ratio = std::pow(10.0, -1.0 / options.steps_per_decade);
  for (double target : eps) {
    double ratio = base_ratio;
    while (y > target) {
      const double y_next = std::max(target, y * ratio);
      // Secant predictor in the height; the corrected point must stay close to it.
      const cplx predicted =
          y_prev > y ? gamma + (gamma - gamma_prev) * ((y_next - y) / (y - y_prev)) : gamma;
      cplx g = predicted;
      if (solve(cplx(ax, -y_next), g) && std::abs(g - predicted) <= 0.1 * std::abs(gamma) + 1e-14) {
        gamma_prev = gamma;
        y_prev = y;
        gamma = g;
        y = y_next;
        ratio = std::max(base_ratio, ratio * ratio);
      } else {
        ratio = std::sqrt(ratio);
        if (ratio > 1.0 - 1e-9)
          throw DomainError("stieltjes_samples: continuation stalled at x = " + std::to_string(x), c.certified_beta());
      }
    }
    const cplx w(ax, -y);
    out.push_back((gamma / w).imag() / std::numbers::pi);
  }
  return out;
}

Recovery recover_measure(const RectTransform& c, const std::vector<double>& x_grid, const RecoveryOptions& options) {
  std::vector<double> xs;
  xs.reserve(x_grid.size());
  for (double x : x_grid) xs.push_back(std::abs(x));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.size() < 2) throw InvalidArgument("recover_measure: need at least two distinct |x| points");

  std::vector<double> eps = options.eps_schedule;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<double> raw(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const auto f = stieltjes_samples(c, xs[i], options);
    // eps * Im G stays put under an atom at 0; that mass goes to atom0 through the residual.
    if (xs[i] == 0.0 && f.size() > 1 && f.front() > 0.0 && eps.back() * f.back() > 0.75 * eps.front() * f.front()) {
      raw[i] = 0.0;
      return;
    }
    if (f.size() == 1) {
      raw[i] = f[0];
      return;
    }
    // Neville tableau in eps evaluated at eps = 0.
    std::vector<double> p = f;
    for (std::size_t m = 1; m < p.size(); ++m)
      for (std::size_t k = 0; k + m < p.size(); ++k)
        p[k] = (eps[k + m] * p[k] - eps[k] * p[k + 1]) / (eps[k + m] - eps[k]);
    raw[i] = p[0];
  });

  Recovery out{SymmetricMeasure::dirac0(), xs, raw};
  out.min_raw_density = *std::min_element(raw.begin(), raw.end());
  for (auto& d : out.density) d = std::max(d, 0.0);
  GridDensity g;
  g.x = xs;
  g.density = out.density;
  g.weights.assign(xs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    g.weights[i] += h / 2;
    g.weights[i + 1] += h / 2;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mass += 2.0 * g.density[i] * g.weights[i];
  out.residual = 1.0 - mass;
  out.atom0 = std::max(out.residual, 0.0);
  out.flagged = std::abs(out.residual) > options.residual_threshold;
  out.certified_beta = c.certified_beta();
  g.atom0 = out.atom0;
  if (mass > 0.0 && out.residual < 0.0)
    for (auto& w : g.weights) w /= mass;
  if (mass > 0.0) out.measure = SymmetricMeasure::grid(std::move(g), 1e-6);
  return out;
}

}  // namespace rectfree::analytic
