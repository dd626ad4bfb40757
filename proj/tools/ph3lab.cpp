#include "ph3/labcli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"ph3lab: numerical laboratory for partially hyperbolic maps of the 3-torus"};
  app.require_subcommand(1);

  ph3::lab::Invocation inv;
  int jobs = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<CLI::App*> experiments;
  for (std::string_view kind : ph3::lab::kinds) {
    CLI::App* sub = app.add_subcommand(std::string(kind), "run a " + std::string(kind) + " experiment");
    sub->add_option("--manifest", inv.manifest, "experiment manifest")->required();
    sub->add_option("--jobs", jobs, "worker cap (default: PH3LAB_JOBS)");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--out", out, "output directory override");
    experiments.push_back(sub);
  }
  app.add_subcommand("list", "print the built-in map catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ph3::lab::exit_failure;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "list") {
    std::cout << ph3::lab::catalog_listing();
    return ph3::lab::exit_ok;
  }
  inv.kind = chosen->get_name();
  if (chosen->count("--jobs")) inv.jobs = jobs;
  if (chosen->count("--seed")) inv.seed = seed;
  if (chosen->count("--out")) inv.out = out;
  return ph3::lab::run(inv, std::cout, std::cerr);
}
