#include "rectfree/ncpart.hpp"

#include <algorithm>
#include <utility>

namespace rectfree::ncpart {

namespace {

void normalize(Blocks& blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

// Checks cover/disjointness of 1..n and fills leader (1-based).
std::vector<int> check_cover(int n, const Blocks& blocks, const char* who) {
  std::vector<int> leader(n + 1, 0);
  for (const auto& b : blocks) {
    if (b.empty()) throw InvalidArgument(std::string(who) + ": empty block");
    for (int k : b) {
      if (k < 1 || k > n) throw InvalidArgument(std::string(who) + ": element out of range");
      if (leader[k] != 0) throw InvalidArgument(std::string(who) + ": blocks overlap");
      leader[k] = b.front();
    }
  }
  for (int k = 1; k <= n; ++k)
    if (leader[k] == 0) throw InvalidArgument(std::string(who) + ": blocks do not cover");
  return leader;
}

// Recursive interval decomposition: the block of the smallest pending element
// is chosen first, the gaps it leaves become new pending intervals.
class Decomposer {
 public:
  Decomposer(bool even_only, std::function<void(const Blocks&)> visit)
      : even_only_(even_only), visit_(std::move(visit)) {}

  void run(int n) {
    pending_.clear();
    blocks_.clear();
    pending_.emplace_back(1, n);
    next_interval();
  }

 private:
  void next_interval() {
    if (pending_.empty()) {
      visit_(blocks_);
      return;
    }
    auto [lo, hi] = pending_.back();
    pending_.pop_back();
    if (lo > hi) {
      next_interval();
    } else {
      current_.push_back({lo});
      grow(lo, hi);
      current_.pop_back();
    }
    pending_.emplace_back(lo, hi);
  }

  void grow(int last, int hi) {
    // Close the block here; the tail (last, hi] becomes a gap.
    const bool tail_ok = !even_only_ || (hi - last) % 2 == 0;
    if (tail_ok && (!even_only_ || current_.back().size() % 2 == 0)) {
      blocks_.push_back(current_.back());
      pending_.emplace_back(last + 1, hi);
      next_interval();
      pending_.pop_back();
      blocks_.pop_back();
    }
    for (int next = last + 1; next <= hi; ++next) {
      if (even_only_ && (next - last - 1) % 2 != 0) continue;
      current_.back().push_back(next);
      pending_.emplace_back(last + 1, next - 1);
      grow(next, hi);
      pending_.pop_back();
      current_.back().pop_back();
    }
  }

  bool even_only_;
  std::function<void(const Blocks&)> visit_;
  std::vector<std::pair<int, int>> pending_;
  std::vector<std::vector<int>> current_;
  Blocks blocks_;
};

}  // namespace

bool non_crossing(const Blocks& blocks) {
  int n = 0;
  for (const auto& b : blocks)
    for (int k : b) n = std::max(n, k);
  std::vector<int> label(n + 1, -1);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (int k : blocks[i]) label[k] = static_cast<int>(i);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      // Restricted to the two blocks, the label sequence must not read ABAB.
      int changes = 0;
      int prev = -1;
      for (int k = 1; k <= n; ++k) {
        const int l = label[k];
        if (l != static_cast<int>(i) && l != static_cast<int>(j)) continue;
        if (prev != -1 && l != prev) ++changes;
        prev = l;
      }
      if (changes >= 3) return false;
    }
  }
  return true;
}

EvenPartition::EvenPartition(int n_half, Blocks blocks) : n_half_(n_half), blocks_(std::move(blocks)) {
  if (n_half < 1) throw InvalidArgument("EvenPartition: n_half must be positive");
  normalize(blocks_);
  leader_ = check_cover(2 * n_half, blocks_, "EvenPartition");
  for (const auto& b : blocks_)
    if (b.size() % 2 != 0) throw InvalidArgument("EvenPartition: block of odd cardinality");
  if (!non_crossing(blocks_)) throw InvalidArgument("EvenPartition: crossing blocks");
}

int EvenPartition::even_min_blocks() const {
  return static_cast<int>(
      std::count_if(blocks_.begin(), blocks_.end(), [](const auto& b) { return b.front() % 2 == 0; }));
}

int EvenPartition::odd_min_blocks() const { return block_count() - even_min_blocks(); }

bool EvenPartition::is_ncd() const {
  for (int k = 2; k <= size(); k += 2)
    if (leader_[k] != leader_[k - 1]) return false;
  return true;
}

EvenPartition EvenPartition::rotate() const {
  Blocks out = blocks_;
  for (auto& b : out)
    for (int& k : b) k = (k == 1) ? size() : k - 1;
  return EvenPartition(n_half_, std::move(out));
}

FreePartition::FreePartition(int n, Blocks blocks) : n_(n), blocks_(std::move(blocks)) {
  if (n < 1) throw InvalidArgument("FreePartition: n must be positive");
  normalize(blocks_);
  check_cover(n, blocks_, "FreePartition");
  if (!non_crossing(blocks_)) throw InvalidArgument("FreePartition: crossing blocks");
}

std::vector<EvenPartition> enumerate_ncprime(int n_half, int max_half) {
  if (n_half < 1) throw InvalidArgument("enumerate_ncprime: n_half must be positive");
  if (n_half > max_half) throw SizeLimitError("enumerate_ncprime", n_half, max_half);
  std::vector<EvenPartition> out;
  Decomposer d(true, [&](const Blocks& b) { out.emplace_back(n_half, b); });
  d.run(2 * n_half);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FreePartition> enumerate_nc(int n, int max_n) {
  if (n < 1) throw InvalidArgument("enumerate_nc: n must be positive");
  if (n > max_n) throw SizeLimitError("enumerate_nc", n, max_n);
  std::vector<FreePartition> out;
  Decomposer d(false, [&](const Blocks& b) { out.emplace_back(n, b); });
  d.run(n);
  return out;
}

void for_each_set_partition(int n, const std::function<void(const Blocks&)>& visit) {
  // Restricted growth string a[0..n-1]: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0), running_max(n, 0);
  while (true) {
    int blocks = running_max[n - 1] + 1;
    Blocks bl(blocks);
    for (int i = 0; i < n; ++i) bl[a[i]].push_back(i + 1);
    visit(bl);
    int i = n - 1;
    while (i > 0 && a[i] == running_max[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    running_max[i] = std::max(running_max[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      running_max[j] = running_max[i];
    }
  }
}

std::vector<EvenPartition> enumerate_ncprime_bruteforce(int n_half, int max_size) {
  if (n_half < 1) throw InvalidArgument("enumerate_ncprime_bruteforce: n_half must be positive");
  if (2 * n_half > max_size) throw SizeLimitError("enumerate_ncprime_bruteforce", 2 * n_half, max_size);
  std::vector<EvenPartition> out;
  for_each_set_partition(2 * n_half, [&](const Blocks& b) {
    for (const auto& block : b)
      if (block.size() % 2 != 0) return;
    if (non_crossing(b)) out.emplace_back(n_half, b);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rectfree::ncpart
