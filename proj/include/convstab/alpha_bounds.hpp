#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "convstab/autocorr_toeplitz.hpp"
#include "convstab/errors.hpp"
#include "convstab/parallel.hpp"
#include "convstab/random.hpp"
#include "convstab/sparse_sequence.hpp"

namespace convstab {

/// Upper stability constant sqrt(min(s, f)).
inline double beta(int s, int f) {
  if (s < 1 || f < 1) detail::fail_invalid("beta: s and f must be positive");
  return std::sqrt(static_cast<double>(std::min(s, f)));
}

struct WitnessPair {
  SparseSequence x;
  SparseSequence y;
};

struct AlternatingOptions {
  int n_eff = 4;
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_rounds = 500;
  double rel_tol = 1e-10;
  // Extra starting points for y (dense, length n_eff, at most f non-zeros),
  // tried in addition to the random restarts.
  std::vector<DenseVector> warm_starts;
};

/// Best value found by alternating minimisation of ||x*y|| over unit x, y
/// supported in [0, n_eff-1] with |supp x| <= s and |supp y| <= f. This is an
/// upper bound on the stability constant alpha(s, f).
struct AlternatingResult {
  int s = 0;
  int f = 0;
  int n_eff = 0;
  double alpha_upper = 0.0;  // sqrt(objective)
  double objective = 0.0;    // smallest eigenvalue reached, = ||x*y||^2
  WitnessPair witness;
  int rounds = 0;            // of the winning start
  int starts = 0;            // random restarts + warm starts
  std::uint64_t seed = 0;
  std::vector<double> trace;  // objective after every half-step of the winning start
};

inline constexpr int kMaxEffectiveDimension = 16;
inline constexpr std::size_t kMaxSupportEnumeration = 100'000;

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<SupportSet> all_supports(int n, int k) {
  if (binomial(n, k) > static_cast<double>(kMaxSupportEnumeration)) {
    fail_budget("support enumeration C(" + std::to_string(n) + "," + std::to_string(k) + ") exceeds " +
                std::to_string(kMaxSupportEnumeration));
  }
  std::vector<SupportSet> out;
  std::vector<Index> pick(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.emplace_back(pick);
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

struct HalfStep {
  double value;
  DenseVector free;  // unit, length n
};

// Exact minimisation over the free factor for a fixed one: the smallest
// eigenvalue over all principal submatrices of B_fixed on the candidate
// supports. Ties keep the lexicographically first support.
inline HalfStep minimise_over(const DenseVector& fixed, const std::vector<SupportSet>& supports) {
  const DenseMatrix full = AutocorrToeplitz::from_generator(fixed).dense();
  const Eigen::Index n = fixed.size();
  HalfStep best{std::numeric_limits<double>::infinity(), DenseVector::Zero(n)};
  const SupportSet* best_support = nullptr;
  DenseVector best_vec;
  for (const auto& S : supports) {
    const auto idx = S.elements();
    const auto k = static_cast<Eigen::Index>(idx.size());
    DenseMatrix sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = full(idx[r], idx[c]);
    EigenPair e = smallest_eigenvalue(sub);
    if (e.value < best.value) {
      best.value = e.value;
      best_support = &S;
      best_vec = std::move(e.vector);
    }
  }
  const auto idx = best_support->elements();
  for (std::size_t r = 0; r < idx.size(); ++r) best.free[idx[r]] = std::conj(best_vec[static_cast<Eigen::Index>(r)]);
  best.free /= best.free.norm();
  return best;
}

inline bool witness_less(const WitnessPair& a, const WitnessPair& b) {
  auto key = [](const SparseSequence& s) {
    std::vector<std::tuple<Index, double, double>> k;
    for (std::size_t i = 0; i < s.size(); ++i) k.emplace_back(s.support()[i], s.values()[i].real(), s.values()[i].imag());
    return k;
  };
  return std::make_pair(key(a.x), key(a.y)) < std::make_pair(key(b.x), key(b.y));
}

struct StartOutcome {
  double objective;
  DenseVector x;
  DenseVector y;
  int rounds;
  std::vector<double> trace;
};

inline StartOutcome run_alternating(DenseVector y, const std::vector<SupportSet>& x_supports,
                                    const std::vector<SupportSet>& y_supports, const AlternatingOptions& opt) {
  StartOutcome out{std::numeric_limits<double>::infinity(), DenseVector(), std::move(y), 0, {}};
  double prev = std::numeric_limits<double>::infinity();
  for (int round = 1; round <= opt.max_rounds; ++round) {
    HalfStep hx = minimise_over(out.y, x_supports);
    out.x = std::move(hx.free);
    out.trace.push_back(hx.value);
    HalfStep hy = minimise_over(out.x, y_supports);
    out.y = std::move(hy.free);
    out.trace.push_back(hy.value);
    out.objective = hy.value;
    out.rounds = round;
    if (std::isfinite(prev) && prev - hy.value <= opt.rel_tol * std::abs(prev)) break;
    prev = hy.value;
  }
  return out;
}

inline WitnessPair trivial_witness(int s, int f) {
  auto flat = [](int k) {
    std::vector<Index> sup(static_cast<std::size_t>(k));
    std::vector<Complex> val(static_cast<std::size_t>(k), Complex(1.0 / std::sqrt(static_cast<double>(k)), 0.0));
    for (int i = 0; i < k; ++i) sup[static_cast<std::size_t>(i)] = i;
    return SparseSequence(std::move(sup), std::move(val));
  };
  return s == 1 ? WitnessPair{SparseSequence::delta(0), flat(f)} : WitnessPair{flat(s), SparseSequence::delta(0)};
}

}  // namespace detail

/// Alternating exact eigen-steps for min ||x*y|| over (s, f)-sparse unit pairs
/// in [0, n_eff-1].
///
/// Each restart draws a random f-sparse unit y, then alternates: the best
/// s-sparse x for fixed y (smallest eigenvalue over all s-row principal
/// submatrices of B_y), then the best f-sparse y for that x. Every half-step is
/// an exact minimisation, so the objective never increases. A restart stops
/// after `max_rounds` or once a round improves by less than `rel_tol`
/// relative. Restarts run in parallel with per-restart seeds derived from
/// `seed`; the winner is the smallest objective with ties broken by the
/// lexicographic witness order, so the result does not depend on the thread
/// count. For s = 1 or f = 1 the value is exactly 1.
inline AlternatingResult alpha_upper_alternating(int s, int f, const AlternatingOptions& opt) {
  const int n = opt.n_eff;
  if (s < 1 || f < 1) detail::fail_invalid("alpha_upper_alternating: s and f must be positive");
  if (n > kMaxEffectiveDimension) {
    detail::fail_budget("alpha_upper_alternating: n_eff = " + std::to_string(n) + " exceeds " + std::to_string(kMaxEffectiveDimension));
  }
  if (s > n || f > n) detail::fail_invalid("alpha_upper_alternating: need s, f <= n_eff");
  if (opt.restarts < 1) detail::fail_invalid("alpha_upper_alternating: restarts must be at least 1");
  if (opt.max_rounds < 1) detail::fail_invalid("alpha_upper_alternating: max_rounds must be at least 1");

  AlternatingResult res;
  res.s = s;
  res.f = f;
  res.n_eff = n;
  res.seed = opt.seed;
  if (s == 1 || f == 1) {
    res.alpha_upper = 1.0;
    res.objective = 1.0;
    res.witness = detail::trivial_witness(s, f);
    res.starts = 0;
    return res;
  }

  const auto x_supports = detail::all_supports(n, s);
  const auto y_supports = detail::all_supports(n, f);
  for (const auto& w : opt.warm_starts) {
    if (w.size() != n) detail::fail_invalid("alpha_upper_alternating: warm start has wrong length");
  }

  const std::size_t total = static_cast<std::size_t>(opt.restarts) + opt.warm_starts.size();
  std::vector<detail::StartOutcome> outcomes(total);
  parallel_for(total, [&](std::size_t r) {
    DenseVector y0;
    if (r < static_cast<std::size_t>(opt.restarts)) {
      Rng rng = make_rng(opt.seed, r);
      const auto sup = random_support(static_cast<std::size_t>(f), 0, n - 1, rng);
      y0 = DenseVector::Zero(n);
      for (Index j : sup) y0[j] = complex_gaussian(rng);
      y0 /= y0.norm();
    } else {
      y0 = opt.warm_starts[r - static_cast<std::size_t>(opt.restarts)];
      y0 /= y0.norm();
    }
    outcomes[r] = detail::run_alternating(std::move(y0), x_supports, y_supports, opt);
  });

  std::size_t best = 0;
  WitnessPair best_w{SparseSequence::from_dense(outcomes[0].x), SparseSequence::from_dense(outcomes[0].y)};
  for (std::size_t r = 1; r < total; ++r) {
    if (outcomes[r].objective > outcomes[best].objective) continue;
    WitnessPair w{SparseSequence::from_dense(outcomes[r].x), SparseSequence::from_dense(outcomes[r].y)};
    if (outcomes[r].objective < outcomes[best].objective || detail::witness_less(w, best_w)) {
      best = r;
      best_w = std::move(w);
    }
  }
  res.objective = std::max(0.0, outcomes[best].objective);
  res.alpha_upper = std::sqrt(res.objective);
  res.witness = std::move(best_w);
  res.rounds = outcomes[best].rounds;
  res.starts = static_cast<int>(total);
  res.trace = std::move(outcomes[best].trace);
  return res;
}

/// min over unit a in C^n of the smallest eigenvalue of B_a, estimated by the
/// same alternating scheme with full supports (an upper estimate of the min).
inline AlternatingResult min_smallest_eigenvalue(int n, int restarts = 32, std::uint64_t seed = 0) {
  AlternatingOptions opt;
  opt.n_eff = n;
  opt.restarts = restarts;
  opt.seed = seed;
  return alpha_upper_alternating(n, n, opt);
}

struct DetBoundOptions {
  int starts = 32;
  int max_iterations = 400;
  std::uint64_t seed = 0;
};

/// Determinant route to a lower bound on min_a lambda(B_a):
/// lambda >= sqrt(2) (2n)^{-n/2} d_n with d_n = min_{unit a} |det B_a|.
///
/// d_n has no closed form; `d_hat` comes from multi-start local minimisation
/// and can only overestimate d_n, so the chain value is an estimate, not a
/// certificate. `instance_bound` is the rigorous per-matrix bound
/// det_eigen_lower_bound at the minimiser found.
struct DetBoundResult {
  int n = 0;
  double d_hat = 0.0;
  double lambda_bound = 0.0;  // sqrt(2) (2n)^{-n/2} d_hat
  double alpha_bound = 0.0;   // sqrt(lambda_bound)
  bool is_estimate = true;
  DenseVector minimizer;
  double instance_bound = 0.0;
  double instance_lambda = 0.0;
};

inline constexpr int kMaxDetBoundDimension = 6;

namespace detail {

inline DenseVector from_real(const Eigen::VectorXd& p) {
  const Eigen::Index n = p.size() / 2;
  DenseVector a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = Complex(p[2 * i], p[2 * i + 1]);
  return a;
}

inline double abs_det_at(const Eigen::VectorXd& p) {
  DenseVector a = from_real(p);
  a /= a.norm();
  return abs_determinant(AutocorrToeplitz::from_generator(a));
}

// Projected gradient descent on the unit sphere of R^{2n} with a central
// difference gradient and Armijo backtracking.
inline std::pair<double, Eigen::VectorXd> local_min_abs_det(Eigen::VectorXd p, int max_iterations) {
  p.normalize();
  double fval = abs_det_at(p);
  double step = 0.5;
  constexpr double h = 1e-6;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      Eigen::VectorXd hi = p, lo = p;
      hi[i] += h;
      lo[i] -= h;
      g[i] = (abs_det_at(hi) - abs_det_at(lo)) / (2 * h);
    }
    g -= g.dot(p) * p;
    const double gn2 = g.squaredNorm();
    if (gn2 < 1e-24) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::VectorXd q = (p - step * g).normalized();
      const double fq = abs_det_at(q);
      if (fq <= fval - 1e-4 * step * gn2) {
        p = q;
        fval = fq;
        moved = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {fval, p};
}

}  // namespace detail

inline DetBoundResult alpha_lower_detbound(int n, const DetBoundOptions& opt = {}) {
  if (n < 2) detail::fail_invalid("alpha_lower_detbound: n_eff must be at least 2");
  if (n > kMaxDetBoundDimension) {
    detail::fail_budget("alpha_lower_detbound: n_eff = " + std::to_string(n) + " exceeds " + std::to_string(kMaxDetBoundDimension));
  }
  if (opt.starts < 1) detail::fail_invalid("alpha_lower_detbound: starts must be at least 1");

  std::vector<std::pair<double, Eigen::VectorXd>> runs(static_cast<std::size_t>(opt.starts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Rng rng = make_rng(opt.seed, r);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd p(2 * n);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = g(rng);
    runs[r] = detail::local_min_abs_det(std::move(p), opt.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].first < runs[best].first) best = r;

  DetBoundResult res;
  res.n = n;
  res.d_hat = runs[best].first;
  res.lambda_bound = std::sqrt(2.0) * std::pow(2.0 * n, -0.5 * n) * res.d_hat;
  res.alpha_bound = std::sqrt(res.lambda_bound);
  res.minimizer = detail::from_real(runs[best].second);
  res.minimizer /= res.minimizer.norm();
  const auto B = AutocorrToeplitz::from_generator(res.minimizer);
  res.instance_bound = det_eigen_lower_bound(B);
  res.instance_lambda = smallest_eigenvalue(B).value;
  return res;
}

struct InequalityReport {
  int s = 0;
  int f = 0;
  double ratio = 0.0;  // ||x*y|| / (||x|| ||y||)
  double beta = 0.0;
  bool upper_ok = true;
  std::optional<double> best_known_alpha;
  bool below_best_known = false;  // a finding, not an error
};

inline constexpr double kUpperBoundSlack = 1e-12;

/// Checks ||x*y|| <= beta(s, f) ||x|| ||y|| for the given pair and reports the
/// normalised ratio, optionally against a known alpha upper bound.
inline InequalityReport verify_inequality(const SparseSequence& x, const SparseSequence& y,
                                          std::optional<double> best_known_alpha = std::nullopt) {
  if (x.empty() || y.empty()) detail::fail_invalid("verify_inequality: both sequences must be non-zero");
  InequalityReport rep;
  rep.s = static_cast<int>(x.size());
  rep.f = static_cast<int>(y.size());
  rep.ratio = norm(convolve(x, y)) / (norm(x) * norm(y));
  rep.beta = beta(rep.s, rep.f);
  rep.upper_ok = rep.ratio <= rep.beta + kUpperBoundSlack;
  rep.best_known_alpha = best_known_alpha;
  rep.below_best_known = best_known_alpha.has_value() && rep.ratio < *best_known_alpha;
  return rep;
}

/// Everything known about alpha(s, f) at one effective dimension.
struct StabilityReport {
  int s = 0;
  int f = 0;
  double beta = 0.0;
  AlternatingResult upper;
  std::optional<DetBoundResult> lower;  // only for 2 <= n_eff <= 6
  int n_eff = 0;
  std::uint64_t seed = 0;
};

inline StabilityReport stability_report(int s, int f, const AlternatingOptions& opt) {
  StabilityReport rep;
  rep.s = s;
  rep.f = f;
  rep.beta = beta(s, f);
  rep.upper = alpha_upper_alternating(s, f, opt);
  rep.n_eff = opt.n_eff;
  rep.seed = opt.seed;
  if (opt.n_eff >= 2 && opt.n_eff <= kMaxDetBoundDimension) {
    DetBoundOptions dopt;
    dopt.seed = derive_seed(opt.seed, 0xD37);
    rep.lower = alpha_lower_detbound(opt.n_eff, dopt);
  }
  return rep;
}

inline constexpr int kMaxTableSparsity = 4;
inline constexpr double kTableTolerance = 1e-8;

struct MonotonicityTable {
  int s_max = 0;
  int f_max = 0;
  int n_eff = 0;
  std::vector<std::vector<double>> values;          // values[s-1][f-1]
  std::vector<std::vector<WitnessPair>> witnesses;  // same layout
  bool monotone = true;
  bool symmetric = true;
};

/// Table of alpha_upper(s, f) for 1 <= s <= s_max, 1 <= f <= f_max.
///
/// Cells are filled in order of s + f. Each run is warm-started from the
/// witnesses of the (s-1, f) and (s, f-1) cells (and their transposes), which
/// are feasible for (s, f); cells (s, f) and (f, s) share the smaller of their
/// two values since ||x*y|| = ||y*x||. The flags report whether the table is
/// non-increasing in each argument and symmetric within 1e-8.
inline MonotonicityTable monotonicity_table(int s_max, int f_max, int n_eff, int restarts, std::uint64_t seed) {
  if (s_max < 1 || f_max < 1) detail::fail_invalid("monotonicity_table: s_max and f_max must be positive");
  if (s_max > kMaxTableSparsity || f_max > kMaxTableSparsity) {
    detail::fail_budget("monotonicity_table: sparsities above " + std::to_string(kMaxTableSparsity) + " exceed the budget");
  }
  if (s_max > n_eff || f_max > n_eff) detail::fail_invalid("monotonicity_table: need s_max, f_max <= n_eff");

  MonotonicityTable t;
  t.s_max = s_max;
  t.f_max = f_max;
  t.n_eff = n_eff;
  t.values.assign(static_cast<std::size_t>(s_max), std::vector<double>(static_cast<std::size_t>(f_max), 0.0));
  t.witnesses.assign(static_cast<std::size_t>(s_max), std::vector<WitnessPair>(static_cast<std::size_t>(f_max)));
  std::vector<std::vector<char>> done(static_cast<std::size_t>(s_max), std::vector<char>(static_cast<std::size_t>(f_max), 0));

  auto in_grid = [&](int s, int f) { return s >= 1 && f >= 1 && s <= s_max && f <= f_max; };
  auto cell = [](auto& grid, int s, int f) -> auto& { return grid[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(f - 1)]; };

  auto compute = [&](int s, int f) {
    AlternatingOptions opt;
    opt.n_eff = n_eff;
    opt.restarts = restarts;
    opt.seed = derive_seed(seed, static_cast<std::uint64_t>(s * 64 + f));
    // Warm starts carry the y factor of feasible smaller pairs.
    auto add_y = [&](const SparseSequence& y) { opt.warm_starts.push_back(y.to_dense(n_eff)); };
    for (auto [ds, df] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const int ps = s - ds, pf = f - df;
      if (in_grid(ps, pf) && cell(done, ps, pf)) add_y(cell(t.witnesses, ps, pf).y);
      if (in_grid(pf, ps) && cell(done, pf, ps)) add_y(cell(t.witnesses, pf, ps).x);
    }
    auto r = alpha_upper_alternating(s, f, opt);
    cell(t.values, s, f) = r.alpha_upper;
    cell(t.witnesses, s, f) = std::move(r.witness);
    cell(done, s, f) = 1;
  };

  for (int total = 2; total <= s_max + f_max; ++total) {
    for (int s = 1; s < total; ++s) {
      const int f = total - s;
      if (!in_grid(s, f) || cell(done, s, f)) continue;
      compute(s, f);
      if (in_grid(f, s) && f != s) {
        compute(f, s);
        double& a = cell(t.values, s, f);
        double& b = cell(t.values, f, s);
        if (b < a) {
          a = b;
          cell(t.witnesses, s, f) = {cell(t.witnesses, f, s).y, cell(t.witnesses, f, s).x};
        } else if (a < b) {
          b = a;
          cell(t.witnesses, f, s) = {cell(t.witnesses, s, f).y, cell(t.witnesses, s, f).x};
        }
      }
    }
  }

  for (int s = 1; s <= s_max; ++s) {
    for (int f = 1; f <= f_max; ++f) {
      const double v = cell(t.values, s, f);
      if (s < s_max && cell(t.values, s + 1, f) > v + kTableTolerance) t.monotone = false;
      if (f < f_max && cell(t.values, s, f + 1) > v + kTableTolerance) t.monotone = false;
      if (in_grid(f, s) && std::abs(cell(t.values, f, s) - v) > kTableTolerance) t.symmetric = false;
    }
  }
  return t;
}

}  // namespace convstab
