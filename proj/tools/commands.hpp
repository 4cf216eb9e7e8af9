#pragma once

// Subcommand implementations for the convstab CLI. Each command writes its
// whole output to `out` in one piece and returns the process exit code:
//   0 ok, 1 property violation, 2 usage / malformed input, 3 overflow, 4 budget.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "convstab/convstab.hpp"

namespace convstab::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kOverflow = 3, kBudget = 4 };

enum class Format { Json, Csv };

struct RunConfig {
  std::string command;
  std::string input;  // path or inline JSON
  std::string x;
  std::string y;
  int s = 2;
  int f = 2;
  int n_eff = 4;
  int restarts = 32;
  long trials = 1000;
  std::uint64_t seed = 0;
  Index window = 1'000'000;
  int grid = kDefaultSymbolGrid;
  std::optional<double> best_known;
  Format format = Format::Json;
  std::string out;
};

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline nlohmann::json load_json(const std::string& arg, const char* flag) {
  if (arg.empty()) throw UsageError(std::string("missing required input ") + flag);
  auto first = std::find_if_not(arg.begin(), arg.end(), [](unsigned char c) { return std::isspace(c); });
  std::string text;
  if (first != arg.end() && (*first == '{' || *first == '[')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw UsageError(std::string("cannot open ") + flag + " file '" + arg + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("malformed JSON in ") + flag + ": " + e.what());
  }
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline int cmd_conv(const RunConfig& cfg, std::ostream& out) {
  const auto x = json::sequence_from_json(load_json(cfg.x, "--x"));
  const auto y = json::sequence_from_json(load_json(cfg.y, "--y"));
  const auto r = convolve(x, y);
  out << dump({{"result", json::to_json(r)}, {"norm_x", norm(x)}, {"norm_y", norm(y)}, {"norm_result", norm(r)}});
  return kOk;
}

inline nlohmann::json report_json(const InequalityReport& r) {
  nlohmann::json j = {{"s", r.s}, {"f", r.f}, {"ratio", r.ratio}, {"beta", r.beta}, {"upper_ok", r.upper_ok}};
  if (r.best_known_alpha) {
    j["best_known_alpha"] = *r.best_known_alpha;
    j["below_best_known"] = r.below_best_known;
  }
  return j;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.x.empty() || !cfg.y.empty()) {
    const auto x = json::sequence_from_json(load_json(cfg.x, "--x"));
    const auto y = json::sequence_from_json(load_json(cfg.y, "--y"));
    const auto rep = verify_inequality(x, y, cfg.best_known);
    out << dump(report_json(rep));
    return rep.upper_ok ? kOk : kViolation;
  }
  if (cfg.trials < 1) throw UsageError("--trials must be at least 1");
  if (cfg.s < 1 || cfg.f < 1) throw UsageError("--s and --f must be positive");
  if (cfg.window < 0 || cfg.window > (Index{1} << 61)) throw UsageError("--window must lie in [0, 2^61]");

  std::vector<InequalityReport> reps(static_cast<std::size_t>(cfg.trials));
  parallel_for(reps.size(), [&](std::size_t t) {
    Rng rng = make_rng(cfg.seed, t);
    const auto x = random_sparse(static_cast<std::size_t>(cfg.s), cfg.window, rng);
    const auto y = random_sparse(static_cast<std::size_t>(cfg.f), cfg.window, rng);
    reps[t] = verify_inequality(x, y, cfg.best_known);
  });

  std::vector<double> ratios;
  long violations = 0;
  long below = 0;
  for (const auto& r : reps) {
    ratios.push_back(r.ratio);
    violations += r.upper_ok ? 0 : 1;
    below += r.below_best_known ? 1 : 0;
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  const double median = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
  nlohmann::json j = {{"trials", cfg.trials}, {"s", cfg.s}, {"f", cfg.f}, {"window", cfg.window}, {"seed", cfg.seed},
                      {"beta", beta(cfg.s, cfg.f)}, {"min_ratio", ratios.front()}, {"median_ratio", median},
                      {"max_ratio", ratios.back()}, {"violations", violations}};
  if (cfg.best_known) {
    j["best_known_alpha"] = *cfg.best_known;
    j["below_best_known"] = below;
  }
  out << dump(j);
  return violations == 0 ? kOk : kViolation;
}

inline SupportSet support_from_arg(const std::string& arg, const char* flag) {
  auto j = load_json(arg, flag);
  std::vector<Index> v;
  if (j.is_object()) {
    auto seq = json::sequence_from_json(j);
    v.assign(seq.support().begin(), seq.support().end());
  } else {
    v = json::indices_from_json(j);
  }
  if (v.empty()) throw UsageError(std::string(flag) + " must not be empty");
  SupportSet s(std::move(v));
  return s.translated(-s.min());
}

inline int cmd_compress(const RunConfig& cfg, std::ostream& out) {
  const auto I = support_from_arg(cfg.x, "--x");
  const auto J = support_from_arg(cfg.y, "--y");
  const auto r = compress_support(I, J);
  out << dump(json::to_json(r));
  return is_freiman_isomorphism(r.map.domain(), r.map.domain(), r.map.as_map()) ? kOk : kViolation;
}

inline int cmd_toeplitz(const RunConfig& cfg, std::ostream& out) {
  const std::string& src = cfg.input.empty() ? cfg.x : cfg.input;
  auto j = load_json(src, "--input");
  DenseVector a;
  if (j.is_object()) {
    const auto seq = canonicalize_shift(json::sequence_from_json(j));
    a = seq.to_dense(seq.support().back() + 1);
  } else {
    a = json::dense_from_json(j);
  }
  const double na = a.norm();
  if (na == 0.0) throw UsageError("generator must be non-zero");
  a /= na;
  const auto B = build_matrix(a);

  if (cfg.format == Format::Csv) {
    if (cfg.grid < 2 * B.dimension()) throw UsageError("--grid must be at least 2n");
    std::string text = "omega,symbol\n";
    for (int t = 0; t < cfg.grid; ++t) {
      const double w = 2.0 * std::numbers::pi * t / cfg.grid;
      text += fmt_double(w) + "," + fmt_double(symbol_eval(B, w)) + "\n";
    }
    out << text;
    return kOk;
  }

  const auto eig = smallest_eigenvalue(B);
  const auto smin = symbol_min(B, cfg.grid);
  const auto coeffs = B.symbol_coefficients();
  auto jm = json::to_json(B);
  jm["generator"] = json::to_json(a);
  jm["mu"] = coeffs.mu;
  jm["nu"] = coeffs.nu;
  jm["smallest_eigenvalue"] = eig.value;
  jm["eigenvector"] = json::to_json(eig.vector);
  jm["abs_det"] = abs_determinant(B);
  jm["autocorr_energy"] = B.autocorr_energy();
  jm["det_lower_bound"] = det_eigen_lower_bound(B);
  jm["symbol_min"] = smin.value;
  jm["symbol_argmin"] = smin.omega;
  jm["grid"] = cfg.grid;
  out << dump(jm);
  return kOk;
}

inline int cmd_alpha(const RunConfig& cfg, std::ostream& out) {
  AlternatingOptions opt;
  opt.n_eff = cfg.n_eff;
  opt.restarts = cfg.restarts;
  opt.seed = cfg.seed;
  const auto rep = stability_report(cfg.s, cfg.f, opt);
  out << dump(json::to_json(rep));
  const bool ordered = rep.upper.alpha_upper <= rep.beta + kUpperBoundSlack;
  return ordered ? kOk : kViolation;
}

inline int cmd_table(const RunConfig& cfg, std::ostream& out) {
  const auto t = monotonicity_table(cfg.s, cfg.f, cfg.n_eff, cfg.restarts, cfg.seed);
  if (cfg.format == Format::Csv) {
    std::string text = "s,f,alpha_upper\n";
    for (int s = 1; s <= t.s_max; ++s)
      for (int f = 1; f <= t.f_max; ++f)
        text += std::to_string(s) + "," + std::to_string(f) + "," + fmt_double(t.values[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(f - 1)]) + "\n";
    out << text;
  } else {
    auto j = json::to_json(t);
    j["seed"] = cfg.seed;
    j["restarts"] = cfg.restarts;
    out << dump(j);
  }
  return t.monotone && t.symmetric ? kOk : kViolation;
}

/// Dispatches cfg.command and maps library errors onto exit codes. Output is
/// buffered and only written to `out` if the command produced it.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream buf;
  int code = kOk;
  try {
    if (cfg.command == "conv") code = cmd_conv(cfg, buf);
    else if (cfg.command == "verify") code = cmd_verify(cfg, buf);
    else if (cfg.command == "compress") code = cmd_compress(cfg, buf);
    else if (cfg.command == "toeplitz") code = cmd_toeplitz(cfg, buf);
    else if (cfg.command == "alpha") code = cmd_alpha(cfg, buf);
    else if (cfg.command == "table") code = cmd_table(cfg, buf);
    else throw UsageError("unknown command '" + cfg.command + "'");
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << "\n";
    return kOverflow;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  out << buf.str();
  return code;
}

}  // namespace convstab::cli
