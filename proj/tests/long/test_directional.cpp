#include <doctest.h>

#include <cmath>

#include "experiments/runner.hpp"

// Opt-in (HYNOMA_LONG_TESTS): directional experiment claims that need real
// training budgets. The default ctest run covers the same machinery at smoke
// scale; the acceptance binary covers the six-arm comparison.

using namespace hynoma;
using experiments::ExperimentConfig;
using experiments::Policy;

static ExperimentConfig desk_config() {
  Config cfg = Config::from_file(std::string(HYNOMA_SOURCE_DIR) + "/configs/desk.cfg");
  return ExperimentConfig::from_config(cfg);
}

TEST_CASE("ablation: the full system tops every single-component removal") {
  auto cfg = desk_config();
  cfg.schedule.episodes = 300;
  cfg.eval_episodes = 20;
  const auto summary = experiments::suite_ablation(cfg, 20, "");
  REQUIRE(summary.rows.size() == 5);
  REQUIRE(summary.rows.front().policy == Policy::HybridDqn);
  const double full = summary.rows.front().hsr_mean;
  for (std::size_t i = 1; i < summary.rows.size(); ++i) {
    INFO("variant ", experiments::policy_name(summary.rows[i].policy), " hsr ",
         summary.rows[i].hsr_mean, " vs full ", full);
    CHECK(full >= summary.rows[i].hsr_mean);
  }
}

TEST_CASE("velocity sweep: handover attempts grow with speed over 30 seeds") {
  auto cfg = desk_config();
  cfg.eval_episodes = 10;
  const double speeds[] = {3.0, 30.0, 60.0, 120.0};
  const auto points = experiments::velocity_sweep(Policy::GoldOnly, speeds, cfg, 30, "");
  REQUIRE(points.size() == 4);
  for (std::size_t i = 1; i < points.size(); ++i)
    CHECK(points[i].mean_attempts_per_episode >=
          points[i - 1].mean_attempts_per_episode - 0.05);
  CHECK(points[3].mean_attempts_per_episode > points[0].mean_attempts_per_episode);
}

TEST_CASE("hybrid-dqn beats gold-only on mean HSR at desk scale") {
  auto cfg = desk_config();
  cfg.eval_episodes = 20;
  const auto trained =
      experiments::train_policy(Policy::HybridDqn, cfg, cfg.base_seed ^ 0x7472ull);
  const auto seeds = experiments::evaluation_seeds(cfg.base_seed, 30);
  const auto dqn_runs = experiments::run_scenario(Policy::HybridDqn, cfg, seeds, &trained.network);
  const auto gold_runs = experiments::run_scenario(Policy::GoldOnly, cfg, seeds);
  const auto dqn = experiments::summarize_arm(Policy::HybridDqn, dqn_runs);
  const auto gold = experiments::summarize_arm(Policy::GoldOnly, gold_runs);
  INFO("dqn ", dqn.hsr_mean, " vs gold ", gold.hsr_mean);
  CHECK(dqn.hsr_mean > gold.hsr_mean);
}
