#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

using convstab::cli::Format;
using convstab::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Sparse convolution stability toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "json";

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"conv", "Convolve two sparse sequences (--x, --y)"},
      {"verify", "Check the upper stability bound on random or given pairs"},
      {"compress", "Minimal-diameter Freiman compression of two supports (--x, --y)"},
      {"toeplitz", "Autocorrelation Toeplitz matrix, eigenvalue and symbol of a generator (--input)"},
      {"alpha", "Upper and lower estimates of the stability constant (--s, --f, --n-eff)"},
      {"table", "alpha_upper table for s <= --s, f <= --f with monotonicity checks"},
  };
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--input", cfg.input, "Input JSON (path or inline)");
    sub->add_option("--x", cfg.x, "First sequence or support (path or inline JSON)");
    sub->add_option("--y", cfg.y, "Second sequence or support (path or inline JSON)");
    sub->add_option("--s", cfg.s, "Sparsity of x (or s_max for table)");
    sub->add_option("--f", cfg.f, "Sparsity of y (or f_max for table)");
    sub->add_option("--n-eff", cfg.n_eff, "Effective ambient dimension");
    sub->add_option("--restarts", cfg.restarts, "Random restarts of the estimator");
    sub->add_option("--trials", cfg.trials, "Random instances for verify");
    sub->add_option("--seed", cfg.seed, "PRNG seed");
    sub->add_option("--window", cfg.window, "Supports are drawn from [-window, window]");
    sub->add_option("--grid", cfg.grid, "Symbol grid points");
    sub->add_option("--best-known", cfg.best_known, "Known alpha upper bound to compare ratios against");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "Write output to this file instead of stdout");
    sub->callback([&cfg, name = std::string(cmd.name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return convstab::cli::kUsage;
  }
  cfg.format = format == "csv" ? Format::Csv : Format::Json;

  std::ostringstream out;
  const int code = convstab::cli::run(cfg, out, std::cerr);
  if (cfg.out.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write '" << cfg.out << "'\n";
      return convstab::cli::kUsage;
    }
    file << out.str();
  }
  return code;
}
