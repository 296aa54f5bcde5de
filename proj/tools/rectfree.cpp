// rectfree: rectangular free convolution from the command line.

#include <iostream>

#include <CLI11.hpp>

#include "rectfree/cli.hpp"
#include "rectfree/error.hpp"

int main(int argc, char** argv) {
  using rectfree::cli::RunConfig;
  CLI::App app{"Rectangular free convolution: moments, cumulants, densities and Monte Carlo checks"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string grid;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--lambda", cfg.lambda, "ratio lambda in [0, 1]")->capture_default_str();
    sub->add_option("--order", cfg.order, "number of even moments / cumulants")->capture_default_str();
    sub->add_option("--out", cfg.out, "output JSON path (CSV written next to it); default stdout");
  };
  auto inputs = [&](CLI::App* sub, int n) {
    sub->add_option("inputs", cfg.inputs, "measure JSON file(s)")->expected(n);
  };
  auto mc_opts = [&](CLI::App* sub) {
    sub->add_option("--q1", cfg.q1, "rows of the q1 x q2 matrices")->capture_default_str();
    sub->add_option("--q2", cfg.q2, "columns (lambda = q1/q2)")->capture_default_str();
    sub->add_option("--trials", cfg.trials, "independent samples")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "RNG seed; results do not depend on the thread count")->capture_default_str();
  };

  auto* convolve = app.add_subcommand("convolve", "moments of mu1 (+)_lambda mu2; density with --grid");
  common(convolve);
  inputs(convolve, 2);
  convolve->add_option("--grid", grid, "xmin:xmax:npts for the analytic density");

  auto* moments = app.add_subcommand("moments", "even moments of a measure");
  common(moments);
  inputs(moments, 1);

  auto* cumulants = app.add_subcommand("cumulants", "rectangular cumulants from a measure or a moment list");
  common(cumulants);
  cumulants->add_option("inputs", cfg.inputs, "measure JSON file")->expected(0, 1);
  cumulants->add_option("--moments", cfg.moments, "m2 m4 ... (instead of a file)")->delimiter(',');

  auto* density = app.add_subcommand("density", "density on a grid: catalog family or recovered from a measure");
  common(density);
  density->add_option("inputs", cfg.inputs, "measure JSON file")->expected(0, 1);
  density->add_option("--grid", grid, "xmin:xmax:npts")->required();
  density->add_option("--family", cfg.family,
                      "bernoulli_conv | rect_gaussian | rect_cauchy | rect_stable | rect_poisson");
  density->add_option("--param", cfg.params, "family parameter, e.g. --param sigma2 2 (sigma2, t, alpha, scale, c)");
  density->add_flag("--recover", cfg.recover, "recover from the transform even when a closed form is known");

  auto* catalog = app.add_subcommand("catalog", "list the closed-form families as JSON");
  common(catalog);

  auto* mc = app.add_subcommand("mc", "Monte Carlo: singular law of A + B against the series prediction");
  common(mc);
  inputs(mc, 2);
  mc_opts(mc);
  mc->add_option("--bins", cfg.bins, "histogram bins (CSV output when > 0)")->capture_default_str();

  auto* trace = app.add_subcommand("trace", "normalized trace of a word in two random rectangular matrices");
  common(trace);
  mc_opts(trace);
  trace->add_option("--word", cfg.word, "e.g. \"M1* M2 M1* M2\"")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (!grid.empty()) cfg.grid = rectfree::cli::parse_grid(grid);
  } catch (const rectfree::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rectfree::cli::run(cfg, std::cout, std::cerr);
}
