#pragma once

// Monte Carlo harness for bi-unitarily invariant rectangular random matrices.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rectfree/measure.hpp"

namespace rectfree::rmt {

using Matrix = Eigen::MatrixXcd;

/// Counter-based generator: output k of stream (seed, stream) is a fixed
/// function of (seed, stream, k). Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Standard complex Gaussian: independent N(0, 1/2) real and imaginary parts.
  cplx complex_normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 0.7071067811865476};
};

/// m x m Haar unitary.
Matrix haar_unitary(int m, CounterRng& rng);

/// The first k columns of an m x m Haar unitary (m x k, orthonormal columns).
Matrix haar_isometry(int m, int k, CounterRng& rng);

/// U diag(s) V restricted to q1 x q2, with independent Haar U (q1 x q1) and V
/// (q2 x q2). Only the first q1 rows of V enter the product.
Matrix sample_rect(int q1, int q2, std::span<const double> singular_values, CounterRng& rng);

/// Singular values of a q1 x q2 matrix (q1 <= q2), ascending, from the
/// eigenvalues of M M*.
std::vector<double> singular_values(const Matrix& m);

/// U f(Sigma) V* for M = U Sigma V* (thin SVD); f should be odd.
Matrix apply_odd_function(const Matrix& m, const std::function<double(double)>& f);

/// (1/q1) Tr (M M*)^k.
double normalized_power_trace(const Matrix& m, int k);

/// An n x n matrix, n = q1 + q2, split into blocks (k, l), k, l in {1, 2}.
class EmbeddedMatrix {
 public:
  EmbeddedMatrix(int q1, int q2);
  EmbeddedMatrix(int q1, int q2, Matrix data);

  /// The n x n extension of a q_k x q_l matrix: zero outside block (k, l).
  static EmbeddedMatrix extend(int q1, int q2, int k, int l, const Matrix& block);
  /// p_k: the identity of block (k, k).
  static EmbeddedMatrix projection(int q1, int q2, int k);
  static EmbeddedMatrix identity(int q1, int q2);

  int q1() const { return q1_; }
  int q2() const { return q2_; }
  int n() const { return q1_ + q2_; }
  const Matrix& data() const { return data_; }
  Matrix block(int k, int l) const;

  friend EmbeddedMatrix operator*(const EmbeddedMatrix& a, const EmbeddedMatrix& b);
  friend EmbeddedMatrix operator+(const EmbeddedMatrix& a, const EmbeddedMatrix& b);
  EmbeddedMatrix adjoint() const;

 private:
  int size(int k) const;
  int offset(int k) const;

  int q1_;
  int q2_;
  Matrix data_;
};

/// (phi_1(x_11), phi_2(x_22)) with phi_k = Tr / q_k.
std::pair<cplx, cplx> block_expectation(const EmbeddedMatrix& x);

struct MomentEstimate {
  int order = 0;  // 2k
  double empirical = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
  double z_score = 0.0;
};

struct Histogram {
  std::vector<double> centers;
  std::vector<double> mass;  // symmetrized singular law, sums to 1
};

struct McOptions {
  int n_moments = 3;        // m_2 .. m_{2 n_moments}
  int histogram_bins = 0;   // 0: no histogram
  double histogram_range = 0.0;  // half-width; 0 picks the largest sampled singular value
};

struct McReport {
  int trials = 0;
  int q1 = 0;
  int q2 = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::vector<MomentEstimate> moments;
  Histogram histogram;
  std::vector<double> singular_values;  // all trials, trial-major

  /// Fraction of sampled singular values strictly above r.
  double fraction_above(double r) const;
};

/// Per trial: A and B from sample_rect with singular values at the quantiles
/// of |mu1| and |mu2|; moments of the singular law of A + B against
/// conv::convolve_moments at lambda = q1 / q2.
McReport mc_convolution(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int q1, int q2, int trials,
                        std::uint64_t seed, const McOptions& options = {});

nlohmann::json to_json(const McReport& report);
/// "bin_center,mass" rows.
std::string histogram_csv(const Histogram& h);

/// One factor of a word: M_index or its adjoint.
struct Letter {
  int index;  // 1 or 2
  bool adjoint;
};

/// Parses "M1* M2 M1* M2" (whitespace optional).
std::vector<Letter> parse_word(const std::string& word);

/// Free-probability value of the normalized trace of a word in two free Haar
/// unitaries: 1 if it reduces cyclically to the empty word, 0 otherwise. This is
/// the square-case (lambda = 1) limit for unit singular values.
double free_unitary_word_trace(const std::vector<Letter>& word);

struct TraceStats {
  int trials = 0;
  double mean_abs = 0.0;  // mean |normalized trace|
  double se_abs = 0.0;
  cplx mean{};
  double prediction = 0.0;  // lambda = 1 limit (unit singular values)
};

/// Normalized trace Tr(word) / q1 over trials. M1 and M2 are sampled by
/// sample_rect with the given singular values (all ones when empty). When
/// q1 != q2 plain and adjoint letters must alternate and the length be even.
TraceStats null_ratio_trace(int q1, int q2, const std::string& word, int trials, std::uint64_t seed,
                            std::span<const double> sv1 = {}, std::span<const double> sv2 = {});

}  // namespace rectfree::rmt
