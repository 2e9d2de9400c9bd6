#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qmkdv/parallel.hpp"

int main(int argc, char** argv) {
  using namespace qmkdv::studies;
  CLI::App app{"Pseudo-spectral simulation and verification studies for quasilinear mKdV"};
  app.set_version_flag("--version", QMKDV_VERSION);

  CommandOptions opt;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string config;
  std::string out = opt.out_dir.string();
  app.add_option("study", opt.study, "identities | simulate | decay | scattering | resonance | oscillatory")
      ->required()
      ->check(CLI::IsMember({"identities", "simulate", "decay", "scattering", "resonance", "oscillatory"}));
  app.add_option("--config", config, "study configuration file")->required();
  app.add_option("--out", out, "output directory (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized suites, overrides the config");
  app.add_flag("--linear-only", opt.linear_only, "switch the nonlinearity off");
  app.add_option("--threads", threads, "worker threads for parallel sweeps")->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  opt.config = config;
  opt.out_dir = out;
  if (*seed_opt) opt.seed = seed;
  qmkdv::set_thread_count(threads);
  return run_command(opt, std::cout, std::cerr);
}
