#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "convstab/errors.hpp"
#include "convstab/sparse_sequence.hpp"

namespace convstab {

using Rng = std::mt19937_64;

// splitmix64 finaliser; turns (base seed, stream counter) into an
// independent engine seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) { return Rng(derive_seed(base, stream)); }

inline Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

// Unit-norm complex Gaussian vector.
inline DenseVector random_unit_vector(Eigen::Index n, Rng& rng) {
  DenseVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_gaussian(rng);
  return v / v.norm();
}

// k distinct integers drawn uniformly from [lo, hi], sorted.
inline std::vector<Index> random_support(std::size_t k, Index lo, Index hi, Rng& rng) {
  if (hi < lo || static_cast<unsigned __int128>(hi - lo) + 1 < k) detail::fail_invalid("random_support: window too small");
  std::uniform_int_distribution<Index> pick(lo, hi);
  std::set<Index> chosen;
  while (chosen.size() < k) chosen.insert(pick(rng));
  return {chosen.begin(), chosen.end()};
}

// k-sparse sequence with support in [-window, window] and unit norm.
inline SparseSequence random_sparse(std::size_t k, Index window, Rng& rng) {
  auto support = random_support(k, -window, window, rng);
  std::vector<Complex> values(k);
  double sq = 0.0;
  for (auto& z : values) {
    do {
      z = complex_gaussian(rng);
    } while (z == Complex(0.0, 0.0));
    sq += std::norm(z);
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& z : values) z *= inv;
  return SparseSequence(std::move(support), std::move(values));
}

}  // namespace convstab
