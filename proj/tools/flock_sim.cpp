// Leader-follower flocking simulation driven by the MRF controller.
//
//   flock_sim --config configs/simulation.cfg --out-dir out [--seed N] [--steps N] [--quiet]
//
// Exit codes: 0 success, 1 runtime/I/O failure, 2 configuration error,
// 3 infeasible scenario.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mrf_flock/mrf_flock.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

void print_report(const mrf_flock::ScenarioConfig& config, const mrf_flock::SimulationLog& log) {
  const auto& last = log.metrics.back();
  std::printf("agents %zu  ticks %zu  seed %llu\n", config.n_agents, config.steps,
              static_cast<unsigned long long>(config.rng_seed));
  std::printf("desired distance  %.4f m\n", mrf_flock::desired_distance(config.controller.potentials));
  std::printf("final order       %.4f\n", last.order);
  std::printf("final d_min/max/avg  %.4f / %.4f / %.4f m\n", last.distance.d_min, last.distance.d_max,
              last.distance.d_avg);
  std::printf("collision free    %s\n", log.all_collision_free() ? "yes" : "no");
  for (std::size_t i = 0; i < log.summary.size(); ++i) {
    std::printf("agent %zu%s  u_avg %.4f m/s^2  length %.3f m\n", i, i == mrf_flock::kLeaderIndex ? " (leader)" : "",
                log.summary[i].u_avg, log.summary[i].traj_length);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MRF predictive flocking simulator"};
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  bool quiet = false;

  app.add_option("--config", config_path, "key = value configuration file (defaults apply if omitted)");
  app.add_option("--out-dir", out_dir, "directory for trajectory.csv, metrics.csv, summary.csv");
  app.add_option("--seed", seed, "override rng_seed");
  app.add_option("--steps", steps, "override steps");
  app.add_flag("--quiet", quiet, "suppress the run report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  mrf_flock::ScenarioConfig config;
  try {
    if (!config_path.empty()) config = mrf_flock::load_config(config_path);
    if (seed) config.rng_seed = *seed;
    if (steps) config.steps = *steps;
    config.validate();
  } catch (const mrf_flock::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mrf_flock::NoMinimum& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto log = mrf_flock::run_simulation(config);
    mrf_flock::write_outputs(out_dir, log);
    if (!quiet) print_report(config, log);
  } catch (const mrf_flock::InfeasibleScenario& e) {
    std::cerr << "infeasible scenario: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const mrf_flock::InfeasibleState& e) {
    std::cerr << "infeasible state: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
