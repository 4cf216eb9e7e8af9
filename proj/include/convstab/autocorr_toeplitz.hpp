#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "convstab/errors.hpp"
#include "convstab/sparse_sequence.hpp"

namespace convstab {

using DenseMatrix = Eigen::MatrixXcd;

/// b_k(a) = sum_l conj(a_l) a_{l+k} for k = 0..n-1; out-of-range terms are zero.
inline std::vector<Complex> autocorrelation(const DenseVector& a) {
  if (a.size() == 0) detail::fail_invalid("autocorrelation: empty generator");
  const Eigen::Index n = a.size();
  std::vector<Complex> b(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Eigen::Index l = 0; l + k < n; ++l) acc += std::conj(a[l]) * a[l + k];
    b[static_cast<std::size_t>(k)] = acc;
  }
  // b_0 = ||a||^2 is real; drop rounding residue in the imaginary part.
  b[0] = Complex(b[0].real(), 0.0);
  return b;
}

/// Fourier coefficients of the real symbol: mu_k = 2 Re b_k, nu_k = -2 Im b_k
/// for k = 1..n-1 (index 0 of each list is k = 1).
struct SymbolCoefficients {
  std::vector<double> mu;
  std::vector<double> nu;
};

/// Hermitian Toeplitz matrix with entry (i, j) = b_{j-i} and b_{-k} = conj(b_k).
class AutocorrToeplitz {
 public:
  // From a first row b_0..b_{n-1}; b_0 must be real.
  explicit AutocorrToeplitz(std::vector<Complex> first_row) : b_(std::move(first_row)) {
    if (b_.empty()) detail::fail_invalid("AutocorrToeplitz: empty first row");
    for (const auto& z : b_) {
      if (!detail::is_finite(z)) detail::fail_invalid("AutocorrToeplitz: non-finite entry");
    }
    if (b_[0].imag() != 0.0) detail::fail_invalid("AutocorrToeplitz: b_0 must be real");
  }

  // B_a built from the autocorrelation of a; keeps a as provenance.
  static AutocorrToeplitz from_generator(const DenseVector& a) {
    AutocorrToeplitz m(autocorrelation(a));
    m.generator_ = a;
    return m;
  }

  [[nodiscard]] Eigen::Index dimension() const { return static_cast<Eigen::Index>(b_.size()); }
  [[nodiscard]] std::span<const Complex> autocorr() const { return b_; }
  [[nodiscard]] const std::optional<DenseVector>& generator() const { return generator_; }

  // b_k for k in -(n-1)..(n-1).
  [[nodiscard]] Complex coefficient(Eigen::Index k) const {
    return k >= 0 ? b_[static_cast<std::size_t>(k)] : std::conj(b_[static_cast<std::size_t>(-k)]);
  }

  [[nodiscard]] Complex entry(Eigen::Index i, Eigen::Index j) const { return coefficient(j - i); }

  [[nodiscard]] DenseMatrix dense() const {
    const Eigen::Index n = dimension();
    DenseMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = entry(i, j);
    return m;
  }

  [[nodiscard]] SymbolCoefficients symbol_coefficients() const {
    SymbolCoefficients c;
    for (std::size_t k = 1; k < b_.size(); ++k) {
      c.mu.push_back(2.0 * b_[k].real());
      c.nu.push_back(-2.0 * b_[k].imag());
    }
    return c;
  }

  // S = sum_{k=-(n-1)}^{n-1} |b_k|^2 = b_0^2 + 2 sum_{k>=1} |b_k|^2.
  [[nodiscard]] double autocorr_energy() const {
    double s = b_[0].real() * b_[0].real();
    for (std::size_t k = 1; k < b_.size(); ++k) s += 2.0 * std::norm(b_[k]);
    return s;
  }

 private:
  std::vector<Complex> b_;
  std::optional<DenseVector> generator_;
};

inline AutocorrToeplitz build_matrix(const DenseVector& a) { return AutocorrToeplitz::from_generator(a); }

/// Symbol b(a, w) = b_0 + sum_{k>=1} (mu_k cos kw + nu_k sin kw).
inline double symbol_eval(const AutocorrToeplitz& B, double omega) {
  const auto b = B.autocorr();
  double acc = b[0].real();
  for (std::size_t k = 1; k < b.size(); ++k) {
    const double kw = static_cast<double>(k) * omega;
    acc += 2.0 * b[k].real() * std::cos(kw) - 2.0 * b[k].imag() * std::sin(kw);
  }
  return acc;
}

/// Two-sided sum sum_k b_k e^{ikw}; its imaginary part vanishes up to rounding.
inline Complex symbol_eval_two_sided(const AutocorrToeplitz& B, double omega) {
  const Eigen::Index n = B.dimension();
  Complex acc = 0.0;
  for (Eigen::Index k = -(n - 1); k <= n - 1; ++k) acc += B.coefficient(k) * std::polar(1.0, static_cast<double>(k) * omega);
  return acc;
}

inline constexpr int kDefaultSymbolGrid = 4096;

struct SymbolMinimum {
  double value;
  double omega;
};

/// Minimum of the symbol over the uniform grid w_t = 2 pi t / grid_size.
/// This estimates min_w b(a, w) from above; the grid must have at least 2n points.
inline SymbolMinimum symbol_min(const AutocorrToeplitz& B, int grid_size = kDefaultSymbolGrid) {
  if (grid_size < 2 * B.dimension()) {
    detail::fail_invalid("symbol_min: grid of " + std::to_string(grid_size) + " points is coarser than 2n = " +
                         std::to_string(2 * B.dimension()));
  }
  SymbolMinimum best{std::numeric_limits<double>::infinity(), 0.0};
  for (int t = 0; t < grid_size; ++t) {
    const double w = 2.0 * std::numbers::pi * t / grid_size;
    const double v = symbol_eval(B, w);
    if (v < best.value) best = {v, w};
  }
  return best;
}

struct EigenPair {
  double value;
  DenseVector vector;  // unit norm
};

inline constexpr double kHermitianTolerance = 1e-12;

/// Smallest eigenvalue of a Hermitian matrix with a unit eigenvector.
inline EigenPair smallest_eigenvalue(const DenseMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) detail::fail_invalid("smallest_eigenvalue: matrix must be square and non-empty");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) detail::fail_invalid("smallest_eigenvalue: matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
  if (m.rows() == 1) return {m(0, 0).real(), DenseVector::Ones(1)};
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m);
  if (solver.info() != Eigen::Success) detail::fail_invalid("smallest_eigenvalue: eigensolver did not converge");
  return {solver.eigenvalues()[0], solver.eigenvectors().col(0)};
}

inline EigenPair smallest_eigenvalue(const AutocorrToeplitz& B) { return smallest_eigenvalue(B.dense()); }

/// B restricted to rows and columns in `rows` (sorted, inside [0, n-1]).
inline DenseMatrix principal_submatrix(const AutocorrToeplitz& B, const SupportSet& rows) {
  const auto idx = rows.elements();
  for (Index i : idx) {
    if (i < 0 || i >= B.dimension()) {
      detail::fail_invalid("principal_submatrix: index " + std::to_string(i) + " outside [0, " + std::to_string(B.dimension()) + ")");
    }
  }
  const auto k = static_cast<Eigen::Index>(idx.size());
  DenseMatrix out(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = B.entry(idx[r], idx[c]);
  return out;
}

/// sum_{i,j} x_i B_ij conj(x_j), which equals ||x * y||^2 for B = B_y with x
/// and y read on {0..n-1}. Its minimum over unit x is the smallest eigenvalue,
/// attained at the conjugate of an eigenvector.
inline double quadratic_form(const DenseMatrix& B, const DenseVector& x) {
  if (B.rows() != x.size() || B.cols() != x.size()) {
    detail::fail_invalid("quadratic_form: vector length " + std::to_string(x.size()) + " does not match matrix size " +
                         std::to_string(B.rows()));
  }
  const DenseVector xc = x.conjugate();
  return xc.dot(B * xc).real();
}

inline double quadratic_form(const AutocorrToeplitz& B, const DenseVector& x) { return quadratic_form(B.dense(), x); }

/// |det B| from a pivoted LU factorisation.
inline double abs_determinant(const AutocorrToeplitz& B) {
  if (B.dimension() == 1) return std::abs(B.autocorr()[0]);
  return std::abs(B.dense().partialPivLu().determinant());
}

/// |det B| / (sqrt(n) S^{(n-1)/2}) with S = sum_k |b_k|^2 (two-sided);
/// a lower bound on the smallest eigenvalue.
inline double det_eigen_lower_bound(const AutocorrToeplitz& B) {
  const double n = static_cast<double>(B.dimension());
  const double s = B.autocorr_energy();
  return abs_determinant(B) / (std::sqrt(n) * std::pow(s, (n - 1.0) / 2.0));
}

}  // namespace convstab
