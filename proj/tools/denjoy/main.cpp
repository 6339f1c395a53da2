#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "denjoy/config.hpp"
#include "denjoy/pipelines.hpp"

namespace {

constexpr const char* kOutDirEnv = "DENJOY_OUT_DIR";

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool plots = false;
};

void add_common(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config_path, "experiment config (INI-style key = value)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts.out_dir, "output directory; overrides $" + std::string(kOutDirEnv));
  sub->add_option("--seed", opts.seed, "RNG seed");
  sub->add_flag("--plots", opts.plots, "write SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace denjoy::cli;

  CLI::App app{"Numerical laboratory for Denjoy-type dynamics on the k-torus", "denjoy"};
  app.set_version_flag("--version", DENJOY_CLI_VERSION);
  app.require_subcommand(1);

  Options opts;
  const std::pair<const char*, const char*> commands[] = {
      {"conf", "Conf(k) metric checks and the 2D Beltrami bridge"},
      {"denjoy", "classical Denjoy circle map"},
      {"blowup", "wandering-ball system and collapse"},
      {"distort", "cocycle distortion bound along a wandering orbit"},
      {"trap", "trapping-ball search and fixed point"},
      {"demo-theorem", "end-to-end contradiction run"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg;
    cfg.kind = parse_experiment(name);
    cfg.experiment_id = name;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.plots) cfg.plots = true;
    if (!opts.out_dir.empty()) {
      cfg.output_dir = opts.out_dir;
    } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
      cfg.output_dir = env;
    }

    const RunOutcome outcome = run(cfg);
    std::cout << outcome.summary;
    std::cout << "results: " << outcome.results_path.string() << "\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.message() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}
