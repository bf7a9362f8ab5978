#include "semifl/experiment.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

using namespace semifl;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("semifl");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("SEMIFL_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> baseline;
  std::optional<int> rounds;
  std::string out = "results";
};

void apply(SemiflConfig& c, const Overrides& o) {
  if (o.baseline) c.allocator = parse_allocator(*o.baseline);
  if (o.rounds) c.rounds = *o.rounds;
  c.validate();
}

ExperimentConfig load(const Overrides& o) {
  spdlog::info("loading {}", o.config);
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.seeds = {*o.seed};
  apply(cfg.sim, o);
  if (cfg.sweep)
    for (auto& p : cfg.sweep->points) apply(p, o);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"SemiFL over-the-air simulator"};
  app.require_subcommand(1);
  Overrides o;
  std::string region = "ns";

  auto add_common = [&](CLI::App* sub, bool out, bool rounds) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "single seed replacing the config's seed list");
    sub->add_option("--baseline", o.baseline, "allocator: proposed, mmse_ci, max_tp, max_cpu, rda, sdr");
    if (out) sub->add_option("--out", o.out, "output directory")->capture_default_str();
    if (rounds) sub->add_option("--rounds", o.rounds, "training rounds")->check(CLI::PositiveNumber);
  };

  auto* optimize = app.add_subcommand("optimize", "single-round allocation on the round-1 channels");
  optimize->add_option("region", region, "ns or s")->required()->check(CLI::IsMember({"ns", "s"}));
  add_common(optimize, false, false);
  auto* simulate = app.add_subcommand("simulate", "full training run per seed");
  add_common(simulate, true, true);
  auto* sweep = app.add_subcommand("sweep", "run every sweep point for every seed");
  add_common(sweep, true, true);
  auto* bounds = app.add_subcommand("bounds", "theory evaluators at the configured constants");
  add_common(bounds, false, false);
  auto* validate = app.add_subcommand("validate", "check a config against the schema");
  validate->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load(o);
    std::uint64_t seed = cfg.seeds.front();
    if (*optimize) {
      std::cout << optimize_json(cfg, region == "s" ? Region::Stable : Region::NonStable, cfg.sim.allocator, seed);
    } else if (*simulate) {
      spdlog::info("simulating {} seed(s), {} rounds", cfg.seeds.size(), cfg.sim.rounds);
      ExperimentFiles f = run_experiment(cfg, o.out);
      spdlog::info("wrote {} and {}", f.csv.string(), f.summary.string());
      std::cout << f.csv.string() << "\n" << f.summary.string() << "\n";
    } else if (*sweep) {
      if (!cfg.sweep) fail(ErrorCode::ConfigError, "$.sweep: the sweep subcommand needs a sweep section");
      auto pts = run_sweep(cfg, o.out);
      spdlog::info("swept {} point(s) over {}", pts.size(), cfg.sweep->axis);
      std::cout << (std::filesystem::path(o.out) / (cfg.name + ".sweep.json")).string() << "\n";
    } else if (*bounds) {
      std::cout << bounds_json(cfg, seed);
    } else if (*validate) {
      std::cout << "{\"valid\":true,\"name\":\"" << cfg.name << "\"}\n";
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    std::cout << error_json(e) << "\n";
    return 2;
  }
  return 0;
}
