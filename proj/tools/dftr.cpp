#include "dftr/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

namespace {

unsigned thread_cap() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DFTR_THREADS")) {
    try {
      const long requested = std::stol(env);
      if (requested >= 1) threads = static_cast<unsigned>(requested);
    } catch (const std::exception&) {
      std::cerr << "ignoring DFTR_THREADS='" << env << "'\n";
    }
  }
  return threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axial dispersion tubular reactor toolkit"};
  app.require_subcommand(1);

  dftr::CliRequest request;
  std::string config_path;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "Config file; built-in defaults when omitted");
  app.add_option("--out", out_dir, "Output directory");

  app.add_subcommand("steady", "Solve the steady state");
  app.add_subcommand("simulate", "Integrate the deviation dynamics");
  auto* sweep = app.add_subcommand("sweep", "Decay-rate table over n and alpha");
  sweep->add_option("--n-list", request.n_list, "Reaction orders")->delimiter(',');
  sweep->add_option("--alpha-list", request.alpha_list, "Feedback gains")->delimiter(',');
  auto* verify = app.add_subcommand("verify", "Run the oracle suite");
  verify->add_option("--seed", request.seed, "Seed of the random dissipativity vectors");

  // Options are also accepted after the subcommand name.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dftr::kExitConfig;
  }

  request.command = app.get_subcommands().front()->get_name();
  if (!config_path.empty()) request.config_path = config_path;
  request.out_dir = out_dir;
  request.threads = thread_cap();
  return dftr::run(request, std::cout, std::cerr);
}
