#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "convstab/errors.hpp"

namespace convstab {

using Index = std::int64_t;
using Complex = std::complex<double>;
using DenseVector = Eigen::VectorXcd;

namespace detail {

inline Index checked_add(Index a, Index b) {
  Index out;
  if (__builtin_add_overflow(a, b, &out)) fail_overflow("index sum " + std::to_string(a) + " + " + std::to_string(b) + " overflows int64");
  return out;
}

inline Index checked_sub(Index a, Index b) {
  Index out;
  if (__builtin_sub_overflow(a, b, &out)) fail_overflow("index difference " + std::to_string(a) + " - " + std::to_string(b) + " overflows int64");
  return out;
}

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

/// Ordered, duplicate-free finite set of integers.
///
/// Construction sorts and deduplicates. Sets whose pairwise sums (and hence
/// whose diameter) would leave the int64 range are rejected with
/// OverflowError.
class SupportSet {
 public:
  SupportSet() = default;

  explicit SupportSet(std::vector<Index> elements) : elems_(std::move(elements)) {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
    if (!elems_.empty()) {
      detail::checked_add(elems_.back(), elems_.back());
      detail::checked_add(elems_.front(), elems_.front());
      detail::checked_sub(elems_.back(), elems_.front());
    }
  }

  SupportSet(std::initializer_list<Index> elements) : SupportSet(std::vector<Index>(elements)) {}

  [[nodiscard]] std::span<const Index> elements() const { return elems_; }
  [[nodiscard]] std::size_t size() const { return elems_.size(); }
  [[nodiscard]] bool empty() const { return elems_.empty(); }
  [[nodiscard]] Index operator[](std::size_t i) const { return elems_[i]; }
  [[nodiscard]] Index min() const { return elems_.front(); }
  [[nodiscard]] Index max() const { return elems_.back(); }
  [[nodiscard]] Index diameter() const { return elems_.empty() ? 0 : elems_.back() - elems_.front(); }

  [[nodiscard]] bool contains(Index v) const { return std::binary_search(elems_.begin(), elems_.end(), v); }

  // Position of v in the sorted element list, or size() if absent.
  [[nodiscard]] std::size_t position(Index v) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), v);
    return (it != elems_.end() && *it == v) ? static_cast<std::size_t>(it - elems_.begin()) : elems_.size();
  }

  [[nodiscard]] SupportSet united(const SupportSet& other) const {
    std::vector<Index> out;
    std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(), std::back_inserter(out));
    return SupportSet(std::move(out));
  }

  [[nodiscard]] SupportSet translated(Index by) const {
    std::vector<Index> out(elems_.size());
    std::transform(elems_.begin(), elems_.end(), out.begin(), [by](Index v) { return detail::checked_add(v, by); });
    return SupportSet(std::move(out));
  }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<Index> elems_;
};

/// Finitely supported complex sequence on the integers.
///
/// The support is strictly increasing and no stored value is exactly zero.
/// Construction accepts unsorted (index, value) data: duplicates are merged by
/// addition and exact zeros are dropped afterwards.
class SparseSequence {
 public:
  SparseSequence() = default;

  SparseSequence(std::vector<Index> support, std::vector<Complex> values) {
    if (support.size() != values.size()) {
      detail::fail_invalid("support has " + std::to_string(support.size()) + " entries but values has " +
                           std::to_string(values.size()));
    }
    std::vector<std::pair<Index, Complex>> entries;
    entries.reserve(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (!detail::is_finite(values[k])) detail::fail_invalid("sequence value at index " + std::to_string(support[k]) + " is not finite");
      entries.emplace_back(support[k], values[k]);
    }
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [idx, val] : entries) {
      if (!support_.empty() && support_.back() == idx) {
        values_.back() += val;
      } else {
        support_.push_back(idx);
        values_.push_back(val);
      }
    }
    drop_zeros();
  }

  SparseSequence(std::initializer_list<std::pair<Index, Complex>> entries) {
    std::vector<Index> s;
    std::vector<Complex> v;
    for (const auto& [i, z] : entries) {
      s.push_back(i);
      v.push_back(z);
    }
    *this = SparseSequence(std::move(s), std::move(v));
  }

  // Reads a dense vector as a sequence supported on {offset, ..., offset+n-1}.
  static SparseSequence from_dense(const DenseVector& dense, Index offset = 0) {
    std::vector<Index> s;
    std::vector<Complex> v;
    for (Eigen::Index i = 0; i < dense.size(); ++i) {
      s.push_back(detail::checked_add(offset, static_cast<Index>(i)));
      v.push_back(dense[i]);
    }
    return SparseSequence(std::move(s), std::move(v));
  }

  static SparseSequence delta(Index at, Complex value = 1.0) { return SparseSequence({at}, {value}); }

  [[nodiscard]] std::span<const Index> support() const { return support_; }
  [[nodiscard]] std::span<const Complex> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return support_.size(); }
  [[nodiscard]] bool empty() const { return support_.empty(); }
  [[nodiscard]] SupportSet support_set() const { return SupportSet(support_); }

  // Value at index i (zero off the support).
  [[nodiscard]] Complex operator[](Index i) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), i);
    if (it == support_.end() || *it != i) return 0.0;
    return values_[static_cast<std::size_t>(it - support_.begin())];
  }

  // Dense copy on {0, ..., length-1}; the support must lie inside.
  [[nodiscard]] DenseVector to_dense(Index length) const {
    DenseVector out = DenseVector::Zero(length);
    for (std::size_t k = 0; k < support_.size(); ++k) {
      if (support_[k] < 0 || support_[k] >= length) {
        detail::fail_invalid("support index " + std::to_string(support_[k]) + " outside [0, " + std::to_string(length) + ")");
      }
      out[support_[k]] = values_[k];
    }
    return out;
  }

  [[nodiscard]] SparseSequence scaled(Complex c) const {
    std::vector<Complex> v(values_);
    for (auto& z : v) z *= c;
    return SparseSequence(support_, std::move(v));
  }

  [[nodiscard]] SparseSequence shifted(Index by) const {
    std::vector<Index> s(support_.size());
    std::transform(support_.begin(), support_.end(), s.begin(), [by](Index i) { return detail::checked_add(i, by); });
    return SparseSequence(std::move(s), values_);
  }

  friend bool operator==(const SparseSequence&, const SparseSequence&) = default;

 private:
  void drop_zeros() {
    std::size_t w = 0;
    for (std::size_t r = 0; r < support_.size(); ++r) {
      if (values_[r] == Complex(0.0, 0.0)) continue;
      support_[w] = support_[r];
      values_[w] = values_[r];
      ++w;
    }
    support_.resize(w);
    values_.resize(w);
  }

  std::vector<Index> support_;
  std::vector<Complex> values_;
};

/// Euclidean norm of the value list.
inline double norm(const SparseSequence& x) {
  double sq = 0.0;
  for (const auto& z : x.values()) sq += std::norm(z);
  return std::sqrt(sq);
}

/// Exact convolution (x*y)_j = sum_i x_i y_{j-i} on the integers.
///
/// Output support is contained in supp x + supp y; bit-exact zeros produced by
/// cancellation are dropped. Throws OverflowError if an index sum leaves the
/// int64 range.
inline SparseSequence convolve(const SparseSequence& x, const SparseSequence& y) {
  const auto xs = x.support();
  const auto ys = y.support();
  const auto xv = x.values();
  const auto yv = y.values();

  std::vector<Index> s;
  std::vector<Complex> v;
  s.reserve(xs.size() * ys.size());
  v.reserve(xs.size() * ys.size());
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = 0; b < ys.size(); ++b) {
      s.push_back(detail::checked_add(xs[a], ys[b]));
      v.push_back(xv[a] * yv[b]);
    }
  }
  // Merge in a fixed order (stable by (a, b)) so equal inputs give bit-equal sums.
  return SparseSequence(std::move(s), std::move(v));
}

/// Translates the support so that its minimum is 0.
inline SparseSequence canonicalize_shift(const SparseSequence& x) {
  if (x.empty()) detail::fail_invalid("canonicalize_shift: empty sequence");
  const Index lo = x.support().front();
  detail::checked_sub(x.support().back(), lo);
  if (lo == std::numeric_limits<Index>::min()) {
    // -lo is not representable; shift in two steps.
    return x.shifted(std::numeric_limits<Index>::max()).shifted(1);
  }
  return x.shifted(-lo);
}

/// Circular convolution on Z/mZ of two equal-length dense vectors.
inline DenseVector circular_convolve(const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size()) {
    detail::fail_invalid("circular_convolve: length mismatch " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() == 0) detail::fail_invalid("circular_convolve: empty input");
  const Eigen::Index m = x.size();
  DenseVector out = DenseVector::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) acc += x[i] * y[(j - i + m) % m];
    out[j] = acc;
  }
  return out;
}

}  // namespace convstab
