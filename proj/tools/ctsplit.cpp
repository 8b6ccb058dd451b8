// ctsplit: run Chen-Teboulle / block-metric proximal point solves, step-size
// sweeps, and print the step-size bound curves.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ctsplit/harness.hpp"

namespace h = ctsplit::harness;

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual proximal splitting solver with block-metric step-size analysis"};
  app.require_subcommand(1);

  std::string output;
  bool quiet = false;
  app.add_option("--output", output, "Write the CSV to this path");
  app.add_flag("--quiet", quiet, "Suppress warnings");

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "Run one solve and write the iteration trace");
  solve->add_option("config", config_path, "YAML run configuration")->required();
  solve->add_option("--output", output, "Trace CSV path (overrides run.output)");
  solve->add_flag("--quiet", quiet, "Suppress warnings");

  double start = 0, stop = 0, step = 0;
  auto* bounds = app.add_subcommand("bounds", "Print both step-size bounds over a grid of ||A||");
  bounds->add_option("start", start)->required();
  bounds->add_option("stop", stop)->required();
  bounds->add_option("step", step)->required();
  bounds->add_option("--output", output, "CSV path (default: standard output)");
  bounds->add_flag("--quiet", quiet);

  std::string lambda_list;
  auto* sweep = app.add_subcommand("sweep", "Run one solve per step size and summarize");
  sweep->add_option("config", config_path, "YAML run configuration")->required();
  sweep->add_option("lambdas", lambda_list, "Comma-separated step sizes, e.g. 0.4,0.6,0.7")->required();
  sweep->add_option("--output", output, "CSV path (default: standard output)");
  sweep->add_flag("--quiet", quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : h::kConfigError;
  }

  h::CommandOptions opts;
  if (!output.empty()) opts.output = output;
  opts.quiet = quiet;

  if (*solve) return h::cmd_solve(config_path, opts, std::cout, std::cerr);

  if (*bounds) {
    if (opts.output) {
      std::ofstream f(*opts.output);
      if (!f) {
        std::cerr << *opts.output << ": error: cannot open output file for writing\n";
        return h::kConfigError;
      }
      return h::cmd_bounds(start, stop, step, f, std::cerr);
    }
    return h::cmd_bounds(start, stop, step, std::cout, std::cerr);
  }

  std::vector<double> lambdas;
  try {
    lambdas = h::parse_lambda_list(lambda_list);
  } catch (const h::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kConfigError;
  }
  return h::cmd_sweep(config_path, lambdas, opts, std::cout, std::cerr);
}
