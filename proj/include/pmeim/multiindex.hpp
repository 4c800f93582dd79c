// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace pmeim {

/// Exponent vector k = (k_1, ..., k_d) of a tensor-power monomial prod_l alpha_l^{k_l}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  /// Zero multi-index of length d.
  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  int size() const { return static_cast<int>(entries_.size()); }
  int weight() const { return weight_; }
  int operator[](int l) const { return entries_[static_cast<std::size_t>(l)]; }
  const std::vector<int> &entries() const { return entries_; }
  bool is_zero() const { return weight_ == 0; }

  MultiIndex operator+(const MultiIndex &other) const;

  bool operator==(const MultiIndex &other) const { return entries_ == other.entries_; }
  /// Graded lexicographic: by weight first, then lexicographic on entries.
  std::strong_ordering operator<=>(const MultiIndex &other) const;

 private:
  std::vector<int> entries_;
  int weight_ = 0;
};

/// All multi-indices of length d and weight at most m, in graded lexicographic order.
class MultiIndexSet {
 public:
  MultiIndexSet(int m, int d, std::vector<MultiIndex> items)
      : m_(m), d_(d), items_(std::move(items)) {}

  int m() const { return m_; }
  int d() const { return d_; }
  std::size_t size() const { return items_.size(); }
  const MultiIndex &operator[](std::size_t i) const { return items_[i]; }
  const std::vector<MultiIndex> &items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  /// Position of k in the set, or -1 if absent.
  long index_of(const MultiIndex &k) const;

 private:
  int m_;
  int d_;
  std::vector<MultiIndex> items_;
};

MultiIndexSet enumerate_kappa(int m, int d);

/// Cardinality Q_{m,d} of the weight-<=m set. Throws std::overflow_error past int64.
std::int64_t count_kappa(int m, int d);

/// Number of multi-indices of length d with weight exactly p, C(p+d-1, d-1).
std::int64_t count_weight_exact(int p, int d);

/// Checked binomial coefficient C(n, k).
std::int64_t binomial(std::int64_t n, std::int64_t k);

}  // namespace pmeim
