// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "convstab/convstab.hpp"
#include "oracles.hpp"

using namespace convstab;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(int id, const char* name, double time_limit, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0) {
    std::ostringstream lim;
    lim << "runtime " << secs << " s over limit " << time_limit << " s";
    c.expect(secs < time_limit, lim.str());
  }
  if (!c.ok) ++failures;
  std::printf("%s %2d %-28s %8.3f s  %s\n", c.ok ? "PASS" : "FAIL", id, name, secs, c.why.str().c_str());
  std::fflush(stdout);
}

std::vector<std::vector<Index>> subsets(int n, int k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (Index i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Shared random generators for criteria 4 to 6.
std::vector<DenseVector> generators() {
  std::vector<DenseVector> g;
  for (std::uint64_t t = 0; t < 500; ++t) {
    Rng rng = make_rng(1004, t);
    g.push_back(random_unit_vector(static_cast<Eigen::Index>(2 + t % 7), rng));
  }
  return g;
}

std::string run_cli(const std::string& args, const char* threads) {
  const std::string cmd = std::string("CONVSTAB_THREADS=") + threads + " '" + CONVSTAB_CLI_PATH + "' " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "<popen failed>";
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  const int status = pclose(p);
  out += "\n<exit " + std::to_string(status) + ">";
  return out;
}

}  // namespace

int main() {
  criterion(1, "quadratic-form identity", 5.0, [](Check& c) {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      Rng rng = make_rng(1001, t);
      const auto n = static_cast<Eigen::Index>(2 + t % 7);
      auto x = random_unit_vector(n, rng);
      auto y = random_unit_vector(n, rng);
      const double lhs = quadratic_form(build_matrix(y), x);
      const double rhs = oracle::norm2(oracle::convolve(oracle::from_dense(x), oracle::from_dense(y)));
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    c.expect(worst <= 1e-12, "max relative error " + std::to_string(worst));
  });

  criterion(2, "upper bound", 10.0, [](Check& c) {
    std::vector<int> bad(10'000, 0);
    parallel_for(bad.size(), [&](std::size_t t) {
      Rng rng = make_rng(1002, t);
      const std::size_t s = 1 + t % 6, f = 1 + (t / 6) % 6;
      auto x = random_sparse(s, 1'000'000, rng);
      auto y = random_sparse(f, 1'000'000, rng);
      const double lhs = norm(convolve(x, y));
      bad[t] = lhs > std::sqrt(static_cast<double>(std::min(s, f))) * norm(x) * norm(y) + 1e-12;
    });
    int violations = 0;
    for (int b : bad) violations += b;
    c.expect(violations == 0, std::to_string(violations) + " violations");
  });

  criterion(3, "singleton equality", 0, [](Check& c) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng rng = make_rng(1003, t);
      auto x = random_sparse(1, 1'000'000, rng).scaled(Complex(1.0 + static_cast<double>(t), 0.5));
      auto y = random_sparse(1 + t % 6, 1'000'000, rng);
      const double r = verify_inequality(x, y).ratio;
      c.expect(std::abs(r - 1.0) <= 1e-12, "ratio " + std::to_string(r));
      c.expect(std::abs(verify_inequality(y, x).ratio - 1.0) <= 1e-12, "swapped ratio off");
    }
  });

  const auto gens = generators();

  criterion(4, "Cauchy interlacing", 0, [&](Check& c) {
    for (std::size_t t = 0; t < gens.size(); ++t) {
      auto B = build_matrix(gens[t]);
      const int n = static_cast<int>(B.dimension());
      const double lam = smallest_eigenvalue(B).value;
      Rng rng = make_rng(1014, t);
      for (int k = 1; k < n; ++k) {
        auto all = subsets(n, k);
        if (n > 6) {
          std::shuffle(all.begin(), all.end(), rng);
          all.resize(std::min<std::size_t>(all.size(), 20));
        }
        for (const auto& rows : all) {
          const double sub = smallest_eigenvalue(principal_submatrix(B, SupportSet(rows))).value;
          c.expect(sub >= lam - 1e-10, "interlacing broken at n=" + std::to_string(n));
        }
      }
    }
  });

  criterion(5, "symbol non-negativity", 0, [&](Check& c) {
    for (const auto& a : gens) {
      auto B = build_matrix(a);
      const double smin = symbol_min(B).value;
      c.expect(smin >= -1e-9, "symbol min " + std::to_string(smin));
      const double lam = smallest_eigenvalue(B).value;
      c.expect(lam > 1e-14, "lambda " + std::to_string(lam));
    }
  });

  criterion(6, "determinant bound", 0, [&](Check& c) {
    for (const auto& a : gens) {
      auto B = build_matrix(a);
      const double lam = smallest_eigenvalue(B).value;
      c.expect(det_eigen_lower_bound(B) <= lam + 1e-10, "det bound above lambda");
      c.expect(B.autocorr_energy() < 2.0 * static_cast<double>(B.dimension()), "S >= 2n");
    }
    DenseVector a(2);
    a << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    auto B = build_matrix(a);
    c.expect(std::abs(det_eigen_lower_bound(B) - 0.4330127) <= 1e-6, "example bound " + std::to_string(det_eigen_lower_bound(B)));
    c.expect(std::abs(smallest_eigenvalue(B).value - 0.5) <= 1e-12, "example lambda");
  });

  criterion(7, "support compression", 60.0, [](Check& c) {
    int done = 0;
    for (std::uint64_t t = 0; done < 200; ++t) {
      Rng rng = make_rng(1007, t);
      const std::size_t s = 2 + t % 3, f = 2 + (t / 3) % 3;
      auto x = canonicalize_shift(random_sparse(s, 1'000'000, rng));
      auto y = canonicalize_shift(random_sparse(f, 1'000'000, rng));
      if (x.support_set().united(y.support_set()).size() > 6) continue;
      ++done;
      auto r = compress_support(x.support_set(), y.support_set());
      const auto& A = r.map.domain();
      c.expect(is_freiman_isomorphism(A, A, r.map.as_map()), "not an isomorphism");
      auto [xt, yt] = embed(x, y, r.map);
      const double before = norm(convolve(x, y));
      const double after = norm(convolve(SparseSequence::from_dense(xt), SparseSequence::from_dense(yt)));
      c.expect(std::abs(after - before) <= 1e-12 * before, "norm not preserved");
      c.expect(static_cast<std::uint64_t>(r.diameter) <= dimension_bound(static_cast<int>(s), static_cast<int>(f)) - 1,
               "diameter above bound");
    }
    auto r = compress_support(SupportSet{0, 1, 100}, SupportSet{0, 1});
    auto ref = oracle::brute_force_compress({0, 1, 100});
    c.expect(r.diameter == 3 && ref.diameter == 3, "example diameter " + std::to_string(r.diameter));
  });

  criterion(8, "alpha estimator", 120.0, [](Check& c) {
    AlternatingOptions opt;
    opt.n_eff = 4;
    opt.restarts = 32;
    const double a = alpha_upper_alternating(2, 2, opt).alpha_upper;
    const double ref = oracle::grid_polish_alpha22(4, 100'000, 7);
    c.expect(std::abs(a - 0.7071068) <= 1e-6, "alpha(2,2) " + std::to_string(a));
    c.expect(std::abs(a - ref) <= 1e-6, "oracle disagrees: " + std::to_string(ref));
    for (int f = 1; f <= 4; ++f) c.expect(alpha_upper_alternating(1, f, opt).alpha_upper == 1.0, "s=1 not exactly 1");
    auto t = monotonicity_table(3, 3, 6, 32, 0);
    c.expect(t.monotone, "table not monotone");
    c.expect(t.symmetric, "table not symmetric");
  });

  criterion(9, "lower-bound chain", 0, [](Check& c) {
    auto lb = alpha_lower_detbound(2);
    const double direct = min_smallest_eigenvalue(2).objective;
    c.expect(std::abs(lb.d_hat - 0.75) <= 1e-4, "d_hat " + std::to_string(lb.d_hat));
    c.expect(std::abs(direct - 0.5) <= 1e-6, "direct min " + std::to_string(direct));
    c.expect(std::abs(lb.lambda_bound - std::sqrt(2.0) / 4.0 * lb.d_hat) <= 1e-15, "chain value");
    c.expect(lb.lambda_bound <= direct, "bound above direct minimum");
  });

  criterion(10, "determinism", 0, [](Check& c) {
    const std::vector<std::string> commands = {
        R"(conv --x '{"support":[0,5],"values":[[1,2],[0.5,-1]]}' --y '{"support":[-3,1],"values":[[0.3,0],[0,0.7]]}')",
        "verify --trials 2000 --s 4 --f 3 --seed 17",
        "compress --x '[0,1,100,2500]' --y '[0,7]'",
        "toeplitz --input '[[0.5,0.1],[0.2,-0.3],[1,0]]' --format csv",
        "alpha --s 2 --f 3 --n-eff 6 --restarts 16 --seed 5",
        "table --s 3 --f 3 --n-eff 5 --restarts 8 --seed 3",
    };
    for (const auto& cmd : commands) {
      const auto a = run_cli(cmd, "1");
      const auto b = run_cli(cmd, "8");
      const auto a2 = run_cli(cmd, "8");
      c.expect(a == b && b == a2, "output differs for: " + cmd);
      c.expect(a.find("<exit 0>") != std::string::npos, "nonzero exit for: " + cmd);
    }
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
