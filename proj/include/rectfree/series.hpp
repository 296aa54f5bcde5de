#pragma once

// Truncated formal power series in one variable and the moment <-> cumulant
// chain built on the auxiliary series T(X) = (lambda X + 1)(X + 1) and
// U = (T - 1)^{<-1>}.
//
// Coefficients are a template parameter: double / std::complex<double> for the
// numeric path, Rational for the exact oracle path.

#include <algorithm>
#include <span>
#include <vector>

#include "rectfree/error.hpp"

namespace rectfree::series {

inline constexpr int kDefaultOrder = 32;

template <class T>
class TruncatedSeries {
 public:
  /// Zero series keeping X^0..X^order.
  explicit TruncatedSeries(int order) : coeffs_(check_order(order) + 1, T(0)) {}

  /// constant + sum_k tail[k-1] X^k, zero-padded or truncated to the order.
  static TruncatedSeries from_tail(int order, const T& constant, std::span<const T> tail) {
    TruncatedSeries s(order);
    s.coeffs_[0] = constant;
    const int n = std::min<int>(order, static_cast<int>(tail.size()));
    for (int k = 1; k <= n; ++k) s.coeffs_[k] = tail[k - 1];
    return s;
  }

  static TruncatedSeries identity(int order) {
    TruncatedSeries s(order);
    if (order >= 1) s.coeffs_[1] = T(1);
    return s;
  }

  static TruncatedSeries constant_series(int order, const T& c) {
    TruncatedSeries s(order);
    s.coeffs_[0] = c;
    return s;
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const T& constant() const { return coeffs_[0]; }
  const T& operator[](int k) const { return coeffs_[k]; }
  T& operator[](int k) { return coeffs_[k]; }

  /// Coefficients of X^1..X^order.
  std::vector<T> tail() const { return {coeffs_.begin() + 1, coeffs_.end()}; }

  TruncatedSeries truncated(int order) const {
    TruncatedSeries s(order);
    for (int k = 0; k <= std::min(order, this->order()); ++k) s.coeffs_[k] = coeffs_[k];
    return s;
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  TruncatedSeries& operator*=(const T& a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, const T& s) { return a *= s; }
  friend TruncatedSeries operator*(const T& s, TruncatedSeries a) { return a *= s; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.same_order(b);
    const int n = a.order();
    TruncatedSeries out(n);
    for (int i = 0; i <= n; ++i) {
      if (a.coeffs_[i] == T(0)) continue;
      for (int j = 0; i + j <= n; ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return out;
  }

  /// this(inner(X)); inner must have zero constant term.
  TruncatedSeries compose(const TruncatedSeries& inner) const {
    same_order(inner);
    if (inner.constant() != T(0)) throw InvalidArgument("compose: inner series has a constant term");
    // Horner: a0 + inner (a1 + inner (a2 + ...)).
    const int n = order();
    TruncatedSeries acc = constant_series(n, coeffs_[n]);
    for (int k = n - 1; k >= 0; --k) {
      acc = acc * inner;
      acc.coeffs_[0] += coeffs_[k];
    }
    return acc;
  }

  TruncatedSeries derivative() const {
    TruncatedSeries d(order());
    for (int k = 1; k <= order(); ++k) d.coeffs_[k - 1] = coeffs_[k] * T(k);
    return d;
  }

  /// 1 / this; requires a nonzero constant term.
  TruncatedSeries reciprocal() const {
    if (constant() == T(0)) throw InvalidArgument("reciprocal: zero constant term");
    const int n = order();
    TruncatedSeries r(n);
    const T inv0 = T(1) / coeffs_[0];
    r.coeffs_[0] = inv0;
    for (int k = 1; k <= n; ++k) {
      T s(0);
      for (int j = 1; j <= k; ++j) s += coeffs_[j] * r.coeffs_[k - j];
      r.coeffs_[k] = -s * inv0;
    }
    return r;
  }

  /// this / X, one order lower; requires a zero constant term.
  TruncatedSeries shift_down() const {
    if (constant() != T(0)) throw InvalidArgument("shift_down: nonzero constant term");
    if (order() < 1) throw InvalidArgument("shift_down: order too small");
    TruncatedSeries s(order() - 1);
    for (int k = 0; k < order(); ++k) s.coeffs_[k] = coeffs_[k + 1];
    return s;
  }

  /// X * this, same order (top coefficient drops).
  TruncatedSeries shift_up() const {
    TruncatedSeries s(order());
    for (int k = order(); k >= 1; --k) s.coeffs_[k] = coeffs_[k - 1];
    return s;
  }

  /// Compositional inverse by Newton iteration on this(G) = X; every step
  /// doubles the number of correct coefficients.
  TruncatedSeries comp_inverse() const {
    check_invertible();
    const int n = order();
    const TruncatedSeries x = identity(n);
    const TruncatedSeries d = derivative();
    TruncatedSeries g = x * (T(1) / coeffs_[1]);
    for (int correct = 1; correct < n; correct *= 2) {
      const TruncatedSeries residual = compose(g) - x;
      g -= residual * d.compose(g).reciprocal();
    }
    // One more pass absorbs rounding on the floating backends.
    if (n > 1) g -= (compose(g) - x) * d.compose(g).reciprocal();
    return g;
  }

  /// Compositional inverse by the direct triangular recursion on coefficients.
  TruncatedSeries comp_inverse_recursive() const {
    check_invertible();
    const int n = order();
    const T inv1 = T(1) / coeffs_[1];
    TruncatedSeries g(n);
    g.coeffs_[1] = inv1;
    for (int k = 2; k <= n; ++k) {
      const T ck = compose(g)[k];
      g.coeffs_[k] = -ck * inv1;
    }
    return g;
  }

  bool operator==(const TruncatedSeries& o) const { return coeffs_ == o.coeffs_; }

 private:
  static int check_order(int order) {
    if (order < 0) throw InvalidArgument("TruncatedSeries: negative order");
    return order;
  }
  void same_order(const TruncatedSeries& o) const {
    if (o.order() != order()) throw InvalidArgument("TruncatedSeries: order mismatch");
  }
  void check_invertible() const {
    if (constant() != T(0)) throw InvalidArgument("comp_inverse: nonzero constant term");
    if (order() < 1 || coeffs_[1] == T(0)) throw InvalidArgument("comp_inverse: zero linear coefficient");
  }

  std::vector<T> coeffs_;
};

/// T(X) = (lambda X + 1)(X + 1).
template <class T>
TruncatedSeries<T> T_series(const T& lambda, int order) {
  TruncatedSeries<T> s(order);
  s[0] = T(1);
  if (order >= 1) s[1] = lambda + T(1);
  if (order >= 2) s[2] = lambda;
  return s;
}

/// U = (T - 1)^{<-1>} from its closed coefficient formula
/// (-1)^{n-1} lambda^{n-1} binom(2n, n) / (2 (lambda+1)^{2n-1} (2n-1)).
template <class T>
TruncatedSeries<T> U_series(const T& lambda, int order) {
  TruncatedSeries<T> s(order);
  T lambda_pow(1);   // lambda^{n-1}
  T base(1);         // (lambda+1)^{2n-1}
  T binom(2);        // binom(2n, n)
  const T lp1 = lambda + T(1);
  base = lp1;
  for (int n = 1; n <= order; ++n) {
    T c = lambda_pow * binom / (T(2) * base * T(2 * n - 1));
    s[n] = (n % 2 == 1) ? c : -c;
    lambda_pow *= lambda;
    base *= lp1 * lp1;
    // binom(2n+2, n+1) = binom(2n, n) (2n+1)(2n+2) / (n+1)^2
    binom = binom * T((2 * n + 1) * (2 * n + 2)) / T((n + 1) * (n + 1));
  }
  return s;
}

/// Rectangular cumulants c_2..c_{2N} from even moments m_2..m_{2N}:
/// C = U(X / (X (T o M))^{<-1>} - 1).
template <class T>
std::vector<T> cumulants_from_moments(std::span<const T> moments, const T& lambda, int order) {
  if (order < 1) throw InvalidArgument("cumulants_from_moments: order must be >= 1");
  if (static_cast<int>(moments.size()) < order)
    throw InvalidArgument("cumulants_from_moments: fewer moments than the requested order");
  // One extra order: dividing the inverse by X loses its top coefficient.
  const int w = order + 1;
  const auto m = TruncatedSeries<T>::from_tail(w, T(0), moments.first(order));
  const auto p = T_series(lambda, w).compose(m).shift_up();
  const auto ratio = p.comp_inverse().shift_down().reciprocal();  // X / P^{<-1>}, order N
  auto v = ratio;
  v[0] -= T(1);
  return U_series(lambda, order).compose(v).tail();
}

/// Even moments from rectangular cumulants by solving M = C o (X (T o M))
/// one coefficient per sweep.
template <class T>
std::vector<T> moments_from_cumulants(std::span<const T> cumulants, const T& lambda, int order) {
  if (order < 1) throw InvalidArgument("moments_from_cumulants: order must be >= 1");
  if (static_cast<int>(cumulants.size()) < order)
    throw InvalidArgument("moments_from_cumulants: fewer cumulants than the requested order");
  const auto c = TruncatedSeries<T>::from_tail(order, T(0), cumulants.first(order));
  const auto t = T_series(lambda, order);
  TruncatedSeries<T> m(order);
  for (int sweep = 0; sweep < order; ++sweep) m = c.compose(t.compose(m).shift_up());
  return m.tail();
}

/// Free cumulants k_1..k_N from moments m_1..m_N: K = X / (X (1 + M))^{<-1>} - 1.
template <class T>
std::vector<T> free_cumulants_from_moments(std::span<const T> moments, int order) {
  if (order < 1) throw InvalidArgument("free_cumulants_from_moments: order must be >= 1");
  if (static_cast<int>(moments.size()) < order)
    throw InvalidArgument("free_cumulants_from_moments: fewer moments than the requested order");
  const int w = order + 1;
  const auto phi = TruncatedSeries<T>::from_tail(w, T(1), moments.first(order)).shift_up();
  auto k = phi.comp_inverse().shift_down().reciprocal();
  k[0] -= T(1);
  return k.tail();
}

/// Moments m_1..m_N from free cumulants: M = K o (X (1 + M)).
template <class T>
std::vector<T> free_moments_from_cumulants(std::span<const T> cumulants, int order) {
  if (order < 1) throw InvalidArgument("free_moments_from_cumulants: order must be >= 1");
  if (static_cast<int>(cumulants.size()) < order)
    throw InvalidArgument("free_moments_from_cumulants: fewer cumulants than the requested order");
  const auto k = TruncatedSeries<T>::from_tail(order, T(0), cumulants.first(order));
  TruncatedSeries<T> m(order);
  for (int sweep = 0; sweep < order; ++sweep) {
    auto one_plus = m;
    one_plus[0] += T(1);
    m = k.compose(one_plus.shift_up());
  }
  return m.tail();
}

}  // namespace rectfree::series
