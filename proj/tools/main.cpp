#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using plim::cli::RunConfig;
  CLI::App app{"Spectra of projective-limit fractals: Laakso spaces, Pate a Choux, stitched strings"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string boundary;

  auto add_run = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", cfg.spec, "JSON spec file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "output directory")->required();
    sub->add_option("--lambda-max", cfg.lambda_max, "spectral truncation");
    sub->add_option("--refine", cfg.refine, "mesh refinement r >= 2");
    sub->add_option("--pitch", cfg.pitch, "explicit mesh pitch");
    sub->add_option("--boundary", boundary, "endpoint condition")->check(CLI::IsMember({"neumann", "dirichlet"}));
    sub->add_option("--seed", cfg.seed, "Lanczos start-vector seed");
    sub->add_option("--tol", cfg.tol, "relative tolerance floor for comparisons");
    sub->add_option("--threads", cfg.threads, "worker threads for level solves")->check(CLI::Range(1, 256));
    return sub;
  };
  auto* laakso = add_run("laakso", "Laakso space: numeric vs closed-form spectrum, nesting");
  auto* choux = add_run("choux", "Pate a Choux: fiber-depth spectra, nesting, gasket decimation");
  auto* string = add_run("string", "stitched fractal string: isospectrality, zeta partial sums");
  auto* verify = app.add_subcommand("verify", "re-check the outputs of a previous run");
  verify->add_option("dir", cfg.out, "run output directory")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--tol", cfg.tol, "relative tolerance floor for comparisons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : plim::cli::kSpecError;
  }

  for (auto* sub : {laakso, choux, string, verify})
    if (sub->parsed()) cfg.command = sub->get_name();
  if (!boundary.empty()) cfg.boundary = plim::parse_boundary(boundary);
  return plim::cli::run(cfg, std::cerr);
}
