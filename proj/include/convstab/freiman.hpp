#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "convstab/errors.hpp"
#include "convstab/sparse_sequence.hpp"

namespace convstab {

using IndexMap = std::map<Index, Index>;

namespace detail {

using Wide = __int128;

inline Index lookup(const IndexMap& phi, Index a) {
  auto it = phi.find(a);
  if (it == phi.end()) fail_invalid("index map is not defined at " + std::to_string(a));
  return it->second;
}

// Walks every pair (i, j) in A1 x A2 and records the sum map i+j -> phi(i)+phi(j).
// The forward implication of the Freiman condition is exactly "this relation is
// a function"; the biconditional additionally needs it to be injective.
inline bool check_sum_relation(const SupportSet& a1, const SupportSet& a2, const IndexMap& phi, bool both_ways) {
  std::vector<Index> img1, img2;
  for (Index i : a1.elements()) img1.push_back(lookup(phi, i));
  for (Index j : a2.elements()) img2.push_back(lookup(phi, j));

  std::map<Wide, Wide> forward;
  std::map<Wide, Wide> backward;
  for (std::size_t p = 0; p < a1.size(); ++p) {
    for (std::size_t q = 0; q < a2.size(); ++q) {
      const Wide ds = Wide(a1[p]) + Wide(a2[q]);
      const Wide is = Wide(img1[p]) + Wide(img2[q]);
      auto [fit, fnew] = forward.emplace(ds, is);
      if (!fnew && fit->second != is) return false;
      if (both_ways) {
        auto [bit, bnew] = backward.emplace(is, ds);
        if (!bnew && bit->second != ds) return false;
      }
    }
  }
  return true;
}

}  // namespace detail

/// phi is a Freiman homomorphism on (A1, A2): i+j = i'+j' implies
/// phi(i)+phi(j) = phi(i')+phi(j') for all i, i' in A1 and j, j' in A2.
inline bool is_freiman_homomorphism(const SupportSet& a1, const SupportSet& a2, const IndexMap& phi) {
  return detail::check_sum_relation(a1, a2, phi, false);
}

/// As is_freiman_homomorphism, with the implication holding in both directions.
inline bool is_freiman_isomorphism(const SupportSet& a1, const SupportSet& a2, const IndexMap& phi) {
  return detail::check_sum_relation(a1, a2, phi, true);
}

/// An injective index map given by a sorted domain and a position-aligned image.
class FreimanMap {
 public:
  FreimanMap(SupportSet domain, std::vector<Index> image) : domain_(std::move(domain)), image_(std::move(image)) {
    if (image_.size() != domain_.size()) detail::fail_invalid("FreimanMap: image and domain sizes differ");
  }

  [[nodiscard]] const SupportSet& domain() const { return domain_; }
  [[nodiscard]] std::span<const Index> image() const { return image_; }

  [[nodiscard]] Index operator()(Index a) const {
    const std::size_t p = domain_.position(a);
    if (p == domain_.size()) detail::fail_invalid("FreimanMap: " + std::to_string(a) + " is not in the domain");
    return image_[p];
  }

  [[nodiscard]] IndexMap as_map() const {
    IndexMap m;
    for (std::size_t k = 0; k < image_.size(); ++k) m.emplace(domain_[k], image_[k]);
    return m;
  }

  [[nodiscard]] Index diameter() const {
    if (image_.empty()) return 0;
    auto [lo, hi] = std::minmax_element(image_.begin(), image_.end());
    return *hi - *lo;
  }

 private:
  SupportSet domain_;
  std::vector<Index> image_;
};

/// Diameter bound n(s, f) = floor(2^{2k log2 k}) + 1 with k = s + f - 2.
///
/// 2^{2k log2 k} = k^{2k} is an integer, so the value is computed exactly.
/// Throws OverflowError once it no longer fits in 64 bits (k >= 10).
inline std::uint64_t dimension_bound(int s, int f) {
  if (s < 2 || f < 2) detail::fail_invalid("dimension_bound: s and f must both be at least 2");
  const std::uint64_t k = static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(f) - 2;
  unsigned __int128 p = 1;
  const unsigned __int128 limit = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t e = 0; e < 2 * k; ++e) {
    p *= k;
    if (p >= limit) detail::fail_overflow("dimension_bound: (s+f-2)^(2(s+f-2)) exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(p) + 1;
}

struct CompressionResult {
  FreimanMap map;
  Index diameter;
  std::uint64_t bound_n;
  bool within_bound;
};

inline constexpr std::size_t kMaxCompressionDomain = 12;
inline constexpr std::uint64_t kDefaultCompressionNodeBudget = 400'000'000;

namespace detail {

// Depth-first search for the lexicographically smallest image list with values
// in [0, D] that keeps a+b -> phi(a)+phi(b) a bijection on A + A.
class CompressionSearch {
 public:
  CompressionSearch(std::span<const Index> domain, std::uint64_t budget) : dom_(domain.begin(), domain.end()), budget_(budget) {
    const std::size_t m = dom_.size();
    // Domain sums are renamed to dense class ids so the tables are flat arrays.
    std::map<Index, int> classes;
    pair_class_.assign(m * m, 0);
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q) classes.emplace(dom_[p] + dom_[q], 0);
    int id = 0;
    for (auto& [sum, c] : classes) c = id++;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = 0; q < m; ++q) pair_class_[p * m + q] = classes.at(dom_[p] + dom_[q]);
    class_image_.assign(static_cast<std::size_t>(id), kUnset);
    class_refs_.assign(static_cast<std::size_t>(id), 0);
  }

  bool run(Index max_value) {
    max_value_ = max_value;
    image_owner_.assign(static_cast<std::size_t>(2 * max_value + 1), -1);
    owner_refs_.assign(static_cast<std::size_t>(2 * max_value + 1), 0);
    std::fill(class_image_.begin(), class_image_.end(), kUnset);
    std::fill(class_refs_.begin(), class_refs_.end(), 0);
    image_.assign(dom_.size(), 0);
    return place(0);
  }

  [[nodiscard]] const std::vector<Index>& image() const { return image_; }
  [[nodiscard]] std::uint64_t nodes() const { return nodes_; }

 private:
  static constexpr Index kUnset = -1;

  bool place(std::size_t k) {
    const std::size_t m = dom_.size();
    if (k == m) return true;
    for (Index v = 0; v <= max_value_; ++v) {
      if (++nodes_ > budget_) fail_budget("compress_support: search exceeded " + std::to_string(budget_) + " nodes");
      image_[k] = v;
      std::size_t added = 0;
      bool ok = true;
      for (std::size_t j = 0; j <= k && ok; ++j) {
        ok = bind(pair_class_[k * m + j], image_[k] + image_[j]);
        if (ok) ++added;
      }
      if (ok && place(k + 1)) return true;
      for (std::size_t j = 0; j < added; ++j) unbind(pair_class_[k * m + j], image_[k] + image_[j]);
    }
    return false;
  }

  bool bind(int cls, Index img_sum) {
    auto c = static_cast<std::size_t>(cls);
    auto s = static_cast<std::size_t>(img_sum);
    if (class_image_[c] != kUnset && class_image_[c] != img_sum) return false;
    if (image_owner_[s] != -1 && image_owner_[s] != cls) return false;
    class_image_[c] = img_sum;
    image_owner_[s] = cls;
    ++class_refs_[c];
    ++owner_refs_[s];
    return true;
  }

  void unbind(int cls, Index img_sum) {
    auto c = static_cast<std::size_t>(cls);
    auto s = static_cast<std::size_t>(img_sum);
    if (--class_refs_[c] == 0) class_image_[c] = kUnset;
    if (--owner_refs_[s] == 0) image_owner_[s] = -1;
  }

  std::vector<Index> dom_;
  std::vector<int> pair_class_;
  std::vector<Index> class_image_;
  std::vector<int> class_refs_;
  std::vector<int> image_owner_;
  std::vector<int> owner_refs_;
  std::vector<Index> image_;
  Index max_value_ = 0;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Minimal-diameter Freiman isomorphism of A = I u J (on A + A) into the integers.
///
/// Both sets must contain 0 and have at least two elements. Diameters are
/// tried in increasing order; for the first feasible one the lexicographically
/// smallest image list is returned, so min(image) = 0. The result always
/// passes is_freiman_isomorphism(A, A, map). Domains larger than
/// kMaxCompressionDomain or searches beyond `node_budget` raise BudgetExceeded.
inline CompressionResult compress_support(const SupportSet& I, const SupportSet& J,
                                          std::uint64_t node_budget = kDefaultCompressionNodeBudget) {
  if (!I.contains(0) || !J.contains(0)) detail::fail_invalid("compress_support: both supports must contain 0 (canonicalize first)");
  if (I.size() < 2 || J.size() < 2) detail::fail_invalid("compress_support: both supports need at least two elements");
  const SupportSet A = I.united(J);
  if (A.size() > kMaxCompressionDomain) {
    detail::fail_budget("compress_support: |I u J| = " + std::to_string(A.size()) + " exceeds the search limit of " +
                        std::to_string(kMaxCompressionDomain));
  }
  const std::uint64_t bound = dimension_bound(static_cast<int>(I.size()), static_cast<int>(J.size()));

  detail::CompressionSearch search(A.elements(), node_budget);
  // The identity (shifted) is feasible, so the loop ends by diameter(A).
  for (Index d = static_cast<Index>(A.size()) - 1; d <= A.diameter(); ++d) {
    if (search.run(d)) {
      FreimanMap map(A, search.image());
      const Index diam = map.diameter();
      return {std::move(map), diam, bound, static_cast<std::uint64_t>(diam) <= bound - 1};
    }
  }
  detail::fail_invalid("compress_support: no isomorphic image found (internal error)");
}

/// Places x and y at their mapped positions in dense vectors of length
/// diameter + 1. Values are copied unchanged, so norms are preserved.
inline std::pair<DenseVector, DenseVector> embed(const SparseSequence& x, const SparseSequence& y, const FreimanMap& map) {
  const auto img = map.image();
  const Index lo = img.empty() ? 0 : *std::min_element(img.begin(), img.end());
  const Index len = map.diameter() + 1;
  auto place = [&](const SparseSequence& s) {
    DenseVector out = DenseVector::Zero(len);
    for (std::size_t k = 0; k < s.size(); ++k) out[map(s.support()[k]) - lo] = s.values()[k];
    return out;
  };
  return {place(x), place(y)};
}

}  // namespace convstab
