#pragma once

// Non-crossing partitions of [2n] with even blocks (NC'(2n)), plain non-crossing
// partitions of [n], and brute-force moment sums over them. Everything here is
// exact and exists to be ground truth for the series engine.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rectfree/error.hpp"

namespace rectfree::ncpart {

inline constexpr int kDefaultMaxHalf = 8;
inline constexpr int kDefaultMaxFree = 12;
inline constexpr int kDefaultMaxBruteForce = 10;

using Blocks = std::vector<std::vector<int>>;

/// Element of NC'(2n). Blocks are sorted, listed by increasing minimum, over
/// the ground set 1..2n. leader(k) is the minimum of the block holding k.
class EvenPartition {
 public:
  /// Validates (cover, disjointness, even sizes, non-crossing); throws
  /// InvalidArgument otherwise.
  EvenPartition(int n_half, Blocks blocks);

  int n_half() const { return n_half_; }
  int size() const { return 2 * n_half_; }
  const Blocks& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int leader(int k) const { return leader_[k]; }

  int even_min_blocks() const;
  int odd_min_blocks() const;

  /// True iff k-1 and k share a block for every even k.
  bool is_ncd() const;

  /// Image under the cycle 2n -> 2n-1 -> ... -> 1 -> 2n.
  EvenPartition rotate() const;

  bool operator==(const EvenPartition& other) const { return blocks_ == other.blocks_; }
  auto operator<=>(const EvenPartition& other) const { return blocks_ <=> other.blocks_; }

 private:
  int n_half_;
  Blocks blocks_;
  std::vector<int> leader_;  // 1-based, leader_[0] unused
};

/// Element of NC(n).
class FreePartition {
 public:
  FreePartition(int n, Blocks blocks);

  int n() const { return n_; }
  const Blocks& blocks() const { return blocks_; }

  bool operator==(const FreePartition& other) const { return blocks_ == other.blocks_; }

 private:
  int n_;
  Blocks blocks_;
};

inline int e_stat(const EvenPartition& p) { return p.even_min_blocks(); }
inline int o_stat(const EvenPartition& p) { return p.odd_min_blocks(); }
inline EvenPartition rotate(const EvenPartition& p) { return p.rotate(); }
inline bool is_ncd(const EvenPartition& p) { return p.is_ncd(); }

/// True iff the blocks (any sizes) are pairwise non-crossing.
bool non_crossing(const Blocks& blocks);

/// Every element of NC'(2 n_half), by recursive interval decomposition.
std::vector<EvenPartition> enumerate_ncprime(int n_half, int max_half = kDefaultMaxHalf);

/// Every element of NC(n), by the same decomposition without parity constraints.
std::vector<FreePartition> enumerate_nc(int n, int max_n = kDefaultMaxFree);

/// Filters all set partitions of [2 n_half] by even blocks and non-crossing.
/// Independent cross-check of enumerate_ncprime; tiny sizes only.
std::vector<EvenPartition> enumerate_ncprime_bruteforce(int n_half,
                                                        int max_size = kDefaultMaxBruteForce);

/// All set partitions of [n] (restricted growth strings).
void for_each_set_partition(int n, const std::function<void(const Blocks&)>& visit);

/// m_{2k} = sum over NC'(2k) of lambda^{e(pi)} prod c_{|V|}, for k = 1..n_max.
/// cumulants[j] holds c_{2(j+1)}.
template <class T>
std::vector<T> moments_from_cumulants_oracle(std::span<const T> cumulants, const T& lambda,
                                             int n_max, int max_half = kDefaultMaxHalf) {
  if (static_cast<int>(cumulants.size()) < n_max)
    throw InvalidArgument("moments_from_cumulants_oracle: need cumulants up to order 2*n_max");
  std::vector<T> moments;
  moments.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    T total(0);
    for (const auto& p : enumerate_ncprime(n, max_half)) {
      T term(1);
      for (int e = p.even_min_blocks(); e > 0; --e) term *= lambda;
      for (const auto& b : p.blocks()) term *= cumulants[b.size() / 2 - 1];
      total += term;
    }
    moments.push_back(total);
  }
  return moments;
}

/// m_n = sum over NC(n) of prod k_{|B|}, n = 1..n_max. cumulants[j] holds k_{j+1}.
template <class T>
std::vector<T> free_moments_from_free_cumulants(std::span<const T> cumulants, int n_max,
                                                int max_n = kDefaultMaxFree) {
  if (static_cast<int>(cumulants.size()) < n_max)
    throw InvalidArgument("free_moments_from_free_cumulants: need cumulants up to n_max");
  std::vector<T> moments;
  moments.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    T total(0);
    for (const auto& p : enumerate_nc(n, max_n)) {
      T term(1);
      for (const auto& b : p.blocks()) term *= cumulants[b.size() - 1];
      total += term;
    }
    moments.push_back(total);
  }
  return moments;
}

}  // namespace rectfree::ncpart
