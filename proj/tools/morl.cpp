#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "morl/cli/config.hpp"
#include "morl/cli/run.hpp"

namespace {

struct RunArgs {
  std::string kind;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> gamma;
  std::optional<double> kernel_nu;
  std::optional<double> noise;
  std::optional<std::size_t> pairs;
  std::optional<std::size_t> episodes;
  std::vector<std::string> sets;
};

int run(const RunArgs& args) {
  using namespace morl::cli;
  json doc = args.config_path.empty() ? json::object() : load_document(args.config_path);
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw morl::InvalidArgument("--set expects key=value, got '" + kv + "'");
    set_dotted(doc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed) doc["seed"] = *args.seed;
  if (args.out) set_dotted(doc, "output.dir", json(*args.out).dump());
  if (args.gamma) doc["environment"]["gamma"] = *args.gamma;
  if (args.kernel_nu) doc["gp"]["nu"] = *args.kernel_nu;
  if (args.noise) doc["gp"]["noise_variance"] = *args.noise;
  if (args.pairs) doc["sweep"]["pairs"] = *args.pairs;
  if (args.episodes) doc["sweep"]["episodes"] = *args.episodes;

  std::optional<std::string> kind;
  if (!args.kind.empty()) kind = args.kind;
  const auto config = resolve_config(doc, kind);

  const auto start = std::chrono::steady_clock::now();
  const auto outcome = run_experiment(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.artifacts.commit(config.out_dir);

  std::cout << outcome.summary;
  std::printf("wall time: %.2f s\nartifacts: %s\n", seconds, config.out_dir.string().c_str());
  return outcome.checks_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-function interpolation across reward weights"};
  app.require_subcommand(1);
  RunArgs args;
  auto* cmd = app.add_subcommand("run", "Run one experiment and write its artifacts");
  cmd->add_option("kind", args.kind,
                  "gridworld-living | gridworld-negative | gridworld-positive | objectworld | pendulum | verify-bounds");
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "RNG seed (default 0)");
  cmd->add_option("--out", args.out, "Output directory (default $MORL_OUT/<kind> or results/<kind>)");
  cmd->add_option("--gamma", args.gamma, "Discount factor");
  cmd->add_option("--kernel-nu", args.kernel_nu, "Matern smoothness: 0.5, 1.5 or 2.5");
  cmd->add_option("--noise", args.noise, "GP noise variance");
  cmd->add_option("--pairs", args.pairs, "Weight pairs for verify-bounds");
  cmd->add_option("--episodes", args.episodes, "Pendulum episodes");
  cmd->add_option("--set", args.sets, "Override any config key, e.g. --set gp.per_dimension=true");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run(args);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::fprintf(stderr, "morl: error: %s\n", msg.c_str());
    return 1;
  }
}
