#include <iostream>

#include <CLI11.hpp>

#include "nehari/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nehari manifold solver and symmetry-breaking study"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "./out";
  int threads = 1;
  bool quiet = false;
  for (const char* name : {"solve", "bisect", "sweep-fit", "check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads for sweep-fit")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "suppress stdout summaries");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nehari::cli::kExitConfig;
  }

  nehari::cli::CommandOptions opts;
  opts.out_dir = out;
  opts.threads = nehari::cli::resolve_threads(threads);
  opts.quiet = quiet;
  const std::string name = app.get_subcommands().front()->get_name();
  return nehari::cli::run_command(name, config, opts, std::cout, std::cerr);
}
