#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddej.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::string out_dir = ".";
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--threads", opts.threads, "override the config thread count")
      ->check(CLI::PositiveNumber);
}

int run_mode(const std::string& mode, const CommonOpts& opts) {
  std::ifstream in(opts.config_path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();

  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s is not valid JSON: %s\n", opts.config_path.c_str(),
                 e.what());
    return DDEJ_ERR_CONFIG;
  }
  cfg["mode"] = mode;
  if (opts.seed) cfg["seed"] = *opts.seed;
  if (opts.threads) cfg["threads"] = *opts.threads;

  char* report = nullptr;
  ddej_status st = ddej_run_config(cfg.dump().c_str(), opts.out_dir.c_str(), &report);
  if (st != DDEJ_OK) {
    std::fprintf(stderr, "error: %s\n", ddej_last_error());
    return st;
  }
  std::printf("%s\n", report);
  ddej_free_string(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay differential equations with Marcus jumps on manifolds"};
  app.set_version_flag("--version", std::string(ddej_version()));
  app.require_subcommand(1);

  const char* modes[] = {"simulate", "ensemble", "transport", "lift-check", "convergence"};
  const char* help[] = {
      "solve one trajectory and write it as CSV",
      "solve many trajectories in parallel and aggregate",
      "parallel transport along a configured curve",
      "compare the lifted solver against the transported base path",
      "self-convergence study over a list of step sizes",
  };

  CommonOpts opts[5];
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(modes[i], help[i]), opts[i]);

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 5; ++i)
    if (app.get_subcommand(modes[i])->parsed()) return run_mode(modes[i], opts[i]);
  return DDEJ_ERR_CONFIG;
}
