// wlc <scenario> --config run.json [--out DIR] [--seed N] [--root smaller|larger] [--threads N]
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wlc/cli/config.hpp"
#include "wlc/cli/run.hpp"

namespace {

int fail(const std::exception& e) {
  std::cerr << wlc::cli::error_json(e).dump(2) << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bichromatic Raman white-light-cavity simulations"};
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string root;
  unsigned threads = 1;
  app.add_option("scenario", scenario, "medium-scan | wlc-solve | sensitivity | mc-noise | cavity-scan | budget")
      ->required();
  app.add_option("-c,--config", config_path, "JSON run configuration")->required();
  app.add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
  app.add_option("--root", root, "splitting root for wlc-solve")->check(CLI::IsMember({"smaller", "larger"}));
  app.add_option("-j,--threads", threads, "worker threads for Monte Carlo")->check(CLI::Range(1u, 1024u));
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw wlc::cli::IoError("cannot read config " + config_path);
    std::stringstream text;
    text << in.rdbuf();
    const wlc::cli::RunConfig cfg = wlc::cli::parse_config(text.str());
    if (scenario != wlc::cli::to_string(cfg.scenario))
      throw wlc::cli::ConfigError("$.scenario", "config is for \"" + std::string(wlc::cli::to_string(cfg.scenario)) +
                                                    "\" but the command line asked for \"" + scenario + "\"");

    wlc::cli::RunOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (*seed_opt) opt.seed = seed;
    if (!root.empty()) opt.root = root == "larger" ? wlc::RootBranch::larger : wlc::RootBranch::smaller;
    opt.threads = threads;
    const wlc::cli::RunResult r = wlc::cli::run(cfg, opt);
    for (const auto& f : r.files) std::cout << f << '\n';
    return 0;
  } catch (const std::exception& e) {
    return fail(e);
  }
}
