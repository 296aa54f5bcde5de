#include "rectfree/rmt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rectfree/conv.hpp"
#include "rectfree/error.hpp"
#include "rectfree/parallel.hpp"

namespace rectfree::rmt {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_dims(int q1, int q2, const char* who) {
  if (q1 < 1 || q2 < 1) throw InvalidArgument(std::string(who) + ": dimensions must be positive");
  if (q1 > q2) throw InvalidArgument(std::string(who) + ": q1 must not exceed q2");
}

// Tr of the product. The word is rotated to start with a q1-row factor and
// multiplied in adjacent pairs, so every intermediate is q1 x q1 when q1 < q2.
cplx word_trace(std::vector<Letter> word, const Matrix& m1, const Matrix& m2) {
  auto factor = [&](const Letter& l) -> Matrix {
    const Matrix& m = l.index == 1 ? m1 : m2;
    return l.adjoint ? Matrix(m.adjoint()) : m;
  };
  if (word.front().adjoint) std::rotate(word.begin(), word.begin() + 1, word.end());
  Matrix p;
  std::size_t i = 0;
  while (i < word.size()) {
    Matrix step = factor(word[i]);
    if (i + 1 < word.size()) step = step * factor(word[i + 1]);
    p = p.size() == 0 ? step : Matrix(p * step);
    i += 2;
  }
  return p.trace();
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * kGolden + 0x632be59bd9b4e019ULL))) {}

CounterRng::result_type CounterRng::operator()() { return mix64(key_ + kGolden * ++counter_); }

cplx CounterRng::complex_normal() {
  const double re = normal_(*this);
  const double im = normal_(*this);
  return {re, im};
}

Matrix haar_isometry(int m, int k, CounterRng& rng) {
  if (m < 1 || k < 1 || k > m) throw InvalidArgument("haar_isometry: need 1 <= k <= m");
  Matrix z(m, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < m; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(m, k);
  const Matrix& r = qr.matrixQR();
  // Phases chosen so that R has a positive diagonal.
  for (int j = 0; j < k; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

Matrix haar_unitary(int m, CounterRng& rng) { return haar_isometry(m, m, rng); }

Matrix sample_rect(int q1, int q2, std::span<const double> singular_values, CounterRng& rng) {
  check_dims(q1, q2, "sample_rect");
  if (static_cast<int>(singular_values.size()) != q1)
    throw InvalidArgument("sample_rect: expected exactly q1 singular values");
  Eigen::VectorXd s(q1);
  for (int i = 0; i < q1; ++i) {
    if (!(singular_values[i] >= 0.0)) throw InvalidArgument("sample_rect: singular values must be >= 0");
    s(i) = singular_values[i];
  }
  const Matrix u = haar_unitary(q1, rng);
  const Matrix w = haar_isometry(q2, q1, rng);
  return u * s.cast<cplx>().asDiagonal() * w.adjoint();
}

std::vector<double> singular_values(const Matrix& m) {
  if (m.rows() > m.cols()) throw InvalidArgument("singular_values: expects q1 <= q2");
  const Matrix g = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("singular_values: eigensolver failed");
  std::vector<double> out(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index i = 0; i < g.rows(); ++i) out[i] = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return out;
}

Matrix apply_odd_function(const Matrix& m, const std::function<double(double)>& f) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd fs = svd.singularValues().unaryExpr([&](double s) { return f(s); });
  return svd.matrixU() * fs.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
}

double normalized_power_trace(const Matrix& m, int k) {
  if (k < 0) throw InvalidArgument("normalized_power_trace: k must be >= 0");
  const Matrix g = m * m.adjoint();
  Matrix p = Matrix::Identity(g.rows(), g.cols());
  for (int i = 0; i < k; ++i) p = p * g;
  return p.trace().real() / static_cast<double>(m.rows());
}

// ---------------------------------------------------------------------------

EmbeddedMatrix::EmbeddedMatrix(int q1, int q2) : EmbeddedMatrix(q1, q2, Matrix::Zero(q1 + q2, q1 + q2)) {}

EmbeddedMatrix::EmbeddedMatrix(int q1, int q2, Matrix data) : q1_(q1), q2_(q2), data_(std::move(data)) {
  if (q1 < 1 || q2 < 1) throw InvalidArgument("EmbeddedMatrix: dimensions must be positive");
  if (data_.rows() != n() || data_.cols() != n()) throw InvalidArgument("EmbeddedMatrix: data must be n x n");
}

int EmbeddedMatrix::size(int k) const {
  if (k == 1) return q1_;
  if (k == 2) return q2_;
  throw InvalidArgument("EmbeddedMatrix: block index must be 1 or 2");
}

int EmbeddedMatrix::offset(int k) const {
  size(k);
  return k == 1 ? 0 : q1_;
}

EmbeddedMatrix EmbeddedMatrix::extend(int q1, int q2, int k, int l, const Matrix& block) {
  EmbeddedMatrix e(q1, q2);
  if (block.rows() != e.size(k) || block.cols() != e.size(l))
    throw InvalidArgument("EmbeddedMatrix::extend: block has the wrong shape");
  e.data_.block(e.offset(k), e.offset(l), e.size(k), e.size(l)) = block;
  return e;
}

EmbeddedMatrix EmbeddedMatrix::projection(int q1, int q2, int k) {
  EmbeddedMatrix e(q1, q2);
  return extend(q1, q2, k, k, Matrix::Identity(e.size(k), e.size(k)));
}

EmbeddedMatrix EmbeddedMatrix::identity(int q1, int q2) {
  return EmbeddedMatrix(q1, q2, Matrix::Identity(q1 + q2, q1 + q2));
}

Matrix EmbeddedMatrix::block(int k, int l) const {
  return data_.block(offset(k), offset(l), size(k), size(l));
}

EmbeddedMatrix operator*(const EmbeddedMatrix& a, const EmbeddedMatrix& b) {
  if (a.q1_ != b.q1_ || a.q2_ != b.q2_) throw InvalidArgument("EmbeddedMatrix: block structures differ");
  return EmbeddedMatrix(a.q1_, a.q2_, a.data_ * b.data_);
}

EmbeddedMatrix operator+(const EmbeddedMatrix& a, const EmbeddedMatrix& b) {
  if (a.q1_ != b.q1_ || a.q2_ != b.q2_) throw InvalidArgument("EmbeddedMatrix: block structures differ");
  return EmbeddedMatrix(a.q1_, a.q2_, a.data_ + b.data_);
}

EmbeddedMatrix EmbeddedMatrix::adjoint() const { return EmbeddedMatrix(q1_, q2_, data_.adjoint()); }

std::pair<cplx, cplx> block_expectation(const EmbeddedMatrix& x) {
  return {x.block(1, 1).trace() / static_cast<double>(x.q1()),
          x.block(2, 2).trace() / static_cast<double>(x.q2())};
}

// ---------------------------------------------------------------------------

double McReport::fraction_above(double r) const {
  if (singular_values.empty()) return 0.0;
  const auto n = std::count_if(singular_values.begin(), singular_values.end(), [r](double s) { return s > r; });
  return static_cast<double>(n) / static_cast<double>(singular_values.size());
}

McReport mc_convolution(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, int q1, int q2, int trials,
                        std::uint64_t seed, const McOptions& options) {
  check_dims(q1, q2, "mc_convolution");
  if (trials < 1) throw InvalidArgument("mc_convolution: trials must be positive");
  if (options.n_moments < 1) throw InvalidArgument("mc_convolution: n_moments must be positive");
  const auto sv1 = abs_quantiles(mu1, q1);
  const auto sv2 = abs_quantiles(mu2, q1);
  const int km = options.n_moments;

  McReport rep;
  rep.trials = trials;
  rep.q1 = q1;
  rep.q2 = q2;
  rep.lambda = static_cast<double>(q1) / q2;
  rep.seed = seed;
  rep.singular_values.assign(static_cast<std::size_t>(trials) * q1, 0.0);
  std::vector<double> per_trial(static_cast<std::size_t>(trials) * km, 0.0);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    CounterRng rng(seed, t);
    const Matrix a = sample_rect(q1, q2, sv1, rng);
    const Matrix b = sample_rect(q1, q2, sv2, rng);
    const auto s = singular_values(a + b);
    std::copy(s.begin(), s.end(), rep.singular_values.begin() + static_cast<std::ptrdiff_t>(t * q1));
    for (double v : s) {
      const double v2 = v * v;
      double p = 1.0;
      for (int k = 0; k < km; ++k) {
        p *= v2;
        per_trial[t * km + k] += p / q1;
      }
    }
  });

  std::vector<double> predicted(km, std::numeric_limits<double>::quiet_NaN());
  if (mu1.bounded() && mu2.bounded()) predicted = conv::convolve_moments(mu1, mu2, rep.lambda, km);

  for (int k = 0; k < km; ++k) {
    double mean = 0.0;
    for (int t = 0; t < trials; ++t) mean += per_trial[t * km + k];
    mean /= trials;
    double var = 0.0;
    for (int t = 0; t < trials; ++t) var += (per_trial[t * km + k] - mean) * (per_trial[t * km + k] - mean);
    var = trials > 1 ? var / (trials - 1) : 0.0;
    MomentEstimate e;
    e.order = 2 * (k + 1);
    e.empirical = mean;
    e.standard_error = std::sqrt(var / trials);
    e.predicted = predicted[k];
    e.z_score = e.standard_error > 0.0 ? (mean - e.predicted) / e.standard_error
                                       : (mean == e.predicted ? 0.0 : std::numeric_limits<double>::infinity());
    rep.moments.push_back(e);
  }

  if (options.histogram_bins > 0) {
    double range = options.histogram_range;
    if (!(range > 0.0)) range = *std::max_element(rep.singular_values.begin(), rep.singular_values.end());
    if (!(range > 0.0)) range = 1.0;
    const int bins = options.histogram_bins;
    const double width = 2.0 * range / bins;
    rep.histogram.mass.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) rep.histogram.centers.push_back(-range + (b + 0.5) * width);
    const double unit = 0.5 / static_cast<double>(rep.singular_values.size());
    for (double s : rep.singular_values) {
      for (double v : {s, -s}) {
        const int b = std::clamp(static_cast<int>(std::floor((v + range) / width)), 0, bins - 1);
        rep.histogram.mass[b] += unit;
      }
    }
  }
  return rep;
}

nlohmann::json to_json(const McReport& r) {
  nlohmann::json moments = nlohmann::json::array();
  for (const auto& m : r.moments) {
    moments.push_back({{"order", m.order},
                       {"empirical", m.empirical},
                       {"standard_error", m.standard_error},
                       {"predicted", std::isfinite(m.predicted) ? nlohmann::json(m.predicted) : nlohmann::json()},
                       {"z_score", std::isfinite(m.z_score) ? nlohmann::json(m.z_score) : nlohmann::json()}});
  }
  nlohmann::json j{{"trials", r.trials}, {"q1", r.q1},           {"q2", r.q2},
                   {"lambda", r.lambda}, {"seed", r.seed},       {"moments", moments}};
  if (!r.histogram.centers.empty()) j["histogram"] = {{"centers", r.histogram.centers}, {"mass", r.histogram.mass}};
  return j;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "bin_center,mass\n";
  for (std::size_t i = 0; i < h.centers.size(); ++i) os << h.centers[i] << ',' << h.mass[i] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<Letter> parse_word(const std::string& word) {
  std::vector<Letter> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < word.size() && std::isspace(static_cast<unsigned char>(word[i]))) ++i;
  };
  skip();
  while (i < word.size()) {
    if (word[i] != 'M' && word[i] != 'm') throw ParseError("word: expected 'M' at position " + std::to_string(i));
    ++i;
    if (i >= word.size() || (word[i] != '1' && word[i] != '2'))
      throw ParseError("word: expected index 1 or 2 at position " + std::to_string(i));
    Letter l{word[i] - '0', false};
    ++i;
    if (i < word.size() && word[i] == '*') {
      l.adjoint = true;
      ++i;
    }
    out.push_back(l);
    skip();
  }
  if (out.empty()) throw ParseError("word: empty");
  return out;
}

double free_unitary_word_trace(const std::vector<Letter>& word) {
  std::vector<Letter> st;
  auto inverse = [](const Letter& a, const Letter& b) { return a.index == b.index && a.adjoint != b.adjoint; };
  for (const auto& l : word) {
    if (!st.empty() && inverse(st.back(), l))
      st.pop_back();
    else
      st.push_back(l);
  }
  std::size_t lo = 0, hi = st.size();
  while (hi - lo >= 2 && inverse(st[lo], st[hi - 1])) {
    ++lo;
    --hi;
  }
  return lo == hi ? 1.0 : 0.0;
}

TraceStats null_ratio_trace(int q1, int q2, const std::string& word, int trials, std::uint64_t seed,
                            std::span<const double> sv1, std::span<const double> sv2) {
  check_dims(q1, q2, "null_ratio_trace");
  if (trials < 1) throw InvalidArgument("null_ratio_trace: trials must be positive");
  const auto letters = parse_word(word);
  auto rows = [&](const Letter& l) { return l.adjoint ? q2 : q1; };
  auto cols = [&](const Letter& l) { return l.adjoint ? q1 : q2; };
  for (std::size_t i = 0; i + 1 < letters.size(); ++i)
    if (cols(letters[i]) != rows(letters[i + 1])) throw ParseError("word: inner dimensions do not match");
  if (rows(letters.front()) != cols(letters.back())) throw ParseError("word: product is not square");

  const std::vector<double> ones(q1, 1.0);
  if (sv1.empty()) sv1 = ones;
  if (sv2.empty()) sv2 = ones;
  const bool unit = std::all_of(sv1.begin(), sv1.end(), [](double s) { return s == 1.0; }) &&
                    std::all_of(sv2.begin(), sv2.end(), [](double s) { return s == 1.0; });

  std::vector<cplx> traces(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    CounterRng rng(seed, t);
    const Matrix m1 = sample_rect(q1, q2, sv1, rng);
    const Matrix m2 = sample_rect(q1, q2, sv2, rng);
    traces[t] = word_trace(letters, m1, m2) / static_cast<double>(q1);
  });

  TraceStats st;
  st.trials = trials;
  double sa = 0.0;
  for (const auto& tr : traces) {
    sa += std::abs(tr);
    st.mean += tr;
  }
  st.mean /= static_cast<double>(trials);
  st.mean_abs = sa / trials;
  double var = 0.0;
  for (const auto& tr : traces) var += (std::abs(tr) - st.mean_abs) * (std::abs(tr) - st.mean_abs);
  st.se_abs = trials > 1 ? std::sqrt(var / (trials - 1) / trials) : 0.0;
  st.prediction = unit ? free_unitary_word_trace(letters) : std::numeric_limits<double>::quiet_NaN();
  return st;
}

}  // namespace rectfree::rmt
