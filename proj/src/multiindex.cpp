// SPDX-License-Identifier: Apache-2.0

#include "pmeim/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pmeim/error.hpp"

namespace pmeim {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw UsageError("multi-index entries must be nonnegative");
  }
  weight_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::operator+(const MultiIndex &other) const {
  if (other.size() != size()) throw UsageError("multi-index length mismatch");
  std::vector<int> sum(entries_);
  for (std::size_t l = 0; l < sum.size(); ++l) sum[l] += other.entries_[l];
  return MultiIndex(std::move(sum));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex &other) const {
  if (auto c = weight_ <=> other.weight_; c != 0) return c;
  return entries_ <=> other.entries_;
}

long MultiIndexSet::index_of(const MultiIndex &k) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), k);
  if (it == items_.end() || !(*it == k)) return -1;
  return static_cast<long>(it - items_.begin());
}

namespace {

// Appends every composition of `remaining` into the slots [pos, d) in lexicographic order.
void compositions(std::vector<int> &work, std::size_t pos, int remaining, std::vector<MultiIndex> &out) {
  if (pos + 1 == work.size()) {
    work[pos] = remaining;
    out.emplace_back(work);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    work[pos] = v;
    compositions(work, pos + 1, remaining - v, out);
  }
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("multi-index count exceeds int64");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("multi-index count exceeds int64");
  return r;
}

}  // namespace

MultiIndexSet enumerate_kappa(int m, int d) {
  if (d < 1) throw UsageError("enumerate_kappa: d must be >= 1, got " + std::to_string(d));
  if (m < 0) throw UsageError("enumerate_kappa: m must be >= 0, got " + std::to_string(m));
  std::vector<MultiIndex> items;
  items.reserve(static_cast<std::size_t>(count_kappa(m, d)));
  std::vector<int> work(static_cast<std::size_t>(d), 0);
  for (int w = 0; w <= m; ++w) compositions(work, 0, w, items);
  return MultiIndexSet(m, d, std::move(items));
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // C(n, i) = C(n, i-1) * (n - k + i) / i; dividing by the gcd first keeps the
  // intermediate product within range whenever the result is representable.
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    std::int64_t num = n - k + i;
    std::int64_t den = i;
    const std::int64_t g1 = std::gcd(result, den);
    result /= g1;
    den /= g1;
    const std::int64_t g2 = std::gcd(num, den);
    num /= g2;
    den /= g2;
    result = checked_mul(result, num) / den;
  }
  return result;
}

std::int64_t count_weight_exact(int p, int d) {
  if (d < 1 || p < 0) throw UsageError("count_weight_exact: need p >= 0 and d >= 1");
  return binomial(static_cast<std::int64_t>(p) + d - 1, d - 1);
}

std::int64_t count_kappa(int m, int d) {
  if (d < 1 || m < 0) throw UsageError("count_kappa: need m >= 0 and d >= 1");
  std::int64_t total = 0;
  for (int p = 0; p <= m; ++p) total = checked_add(total, count_weight_exact(p, d));
  return total;
}

}  // namespace pmeim
