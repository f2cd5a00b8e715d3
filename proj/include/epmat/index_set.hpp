#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace epmat {

/// Largest subset family any enumeration is allowed to produce.
inline constexpr std::int64_t kMaxEnumeration = 20000;

/// Number of k-element subsets of an n-set. Exact integer arithmetic;
/// throws CapacityError when intermediate products leave int64 range.
std::int64_t binomial(int n, int k);

/// A strictly increasing tuple of indices drawn from {1..n}.
/// The empty tuple is valid and labels the order-0 minor.
class IndexSet {
 public:
  IndexSet(int ambient, std::vector<int> elems);

  static IndexSet empty(int ambient);
  static IndexSet full(int ambient);

  int ambient() const { return ambient_; }
  int size() const { return static_cast<int>(elems_.size()); }
  const std::vector<int>& elems() const { return elems_; }

  int element_sum() const;
  bool contains(int i) const;

  /// "{1,3}" with 1-based indices; "{}" for the empty set.
  std::string to_string() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.ambient_ == b.ambient_ && a.elems_ == b.elems_;
  }

 private:
  int ambient_;
  std::vector<int> elems_;
};

/// All k-subsets of {1..n} in lexicographic order.
/// Throws CapacityError when C(n,k) exceeds kMaxEnumeration.
std::vector<IndexSet> enumerate_index_sets(int k, int n);

/// Zero-based position of alpha within the lexicographic enumeration
/// of its (k, n) family.
std::int64_t lex_rank(const IndexSet& alpha);

/// Complement within {1..n}, ascending.
IndexSet complement(const IndexSet& alpha);

/// (-1)^(sum(alpha) + sum(beta)). Requires equal sizes and ambients.
int signature_sign(const IndexSet& alpha, const IndexSet& beta);

}  // namespace epmat
