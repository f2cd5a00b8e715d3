#include "epmat/index_set.hpp"

#include "epmat/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace epmat {

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) stays exact: r is always a binomial coefficient here
    std::int64_t num = n - k + i;
    if (r > std::numeric_limits<std::int64_t>::max() / num) {
      throw CapacityError("binomial(" + std::to_string(n) + "," +
                          std::to_string(k) + ") exceeds int64 range");
    }
    r = r * num / i;
  }
  return r;
}

IndexSet::IndexSet(int ambient, std::vector<int> elems)
    : ambient_(ambient), elems_(std::move(elems)) {
  if (ambient_ < 0) throw DomainError("IndexSet: negative ambient size");
  int prev = 0;
  for (int e : elems_) {
    if (e <= prev || e > ambient_) {
      throw DomainError("IndexSet: elements must be strictly increasing in 1.." +
                        std::to_string(ambient_));
    }
    prev = e;
  }
}

IndexSet IndexSet::empty(int ambient) { return IndexSet(ambient, {}); }

IndexSet IndexSet::full(int ambient) {
  std::vector<int> all(ambient);
  std::iota(all.begin(), all.end(), 1);
  return IndexSet(ambient, std::move(all));
}

int IndexSet::element_sum() const {
  return std::accumulate(elems_.begin(), elems_.end(), 0);
}

bool IndexSet::contains(int i) const {
  return std::binary_search(elems_.begin(), elems_.end(), i);
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < elems_.size(); ++i) {
    if (i) os << ',';
    os << elems_[i];
  }
  os << '}';
  return os.str();
}

std::vector<IndexSet> enumerate_index_sets(int k, int n) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError("enumerate_index_sets: need 0 <= k <= n");
  }
  std::int64_t count = binomial(n, k);
  if (count > kMaxEnumeration) {
    throw CapacityError("enumerate_index_sets: C(" + std::to_string(n) + "," +
                        std::to_string(k) + ") = " + std::to_string(count) +
                        " exceeds cap " + std::to_string(kMaxEnumeration));
  }
  std::vector<IndexSet> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> cur(k);
  std::iota(cur.begin(), cur.end(), 1);
  while (true) {
    out.emplace_back(n, cur);
    // advance to the lexicographic successor
    int i = k - 1;
    while (i >= 0 && cur[i] == n - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::int64_t lex_rank(const IndexSet& alpha) {
  const int n = alpha.ambient();
  const int k = alpha.size();
  std::int64_t rank = 0;
  int prev = 0;
  for (int j = 0; j < k; ++j) {
    int e = alpha.elems()[j];
    // subsets whose j-th element is smaller than e
    for (int v = prev + 1; v < e; ++v) rank += binomial(n - v, k - 1 - j);
    prev = e;
  }
  return rank;
}

IndexSet complement(const IndexSet& alpha) {
  std::vector<int> out;
  out.reserve(alpha.ambient() - alpha.size());
  for (int i = 1; i <= alpha.ambient(); ++i) {
    if (!alpha.contains(i)) out.push_back(i);
  }
  return IndexSet(alpha.ambient(), std::move(out));
}

int signature_sign(const IndexSet& alpha, const IndexSet& beta) {
  if (alpha.size() != beta.size() || alpha.ambient() != beta.ambient()) {
    throw DomainError("signature_sign: index sets must share size and ambient");
  }
  return ((alpha.element_sum() + beta.element_sum()) % 2 == 0) ? 1 : -1;
}

}  // namespace epmat
