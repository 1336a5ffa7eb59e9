#include <doctest.h>

#include <cmath>

#include "experiments/runner.hpp"

using namespace hynoma;
using experiments::ExperimentConfig;
using experiments::Policy;

// smoke-scale configuration: tiny episode counts, mechanics only
static ExperimentConfig smoke_config() {
  Config cfg = Config::from_string(
      "rings = 1\n"
      "users_per_cell = 6\n"
      "episode_ticks = 100\n"
      "eval_episodes = 3\n"
      "velocity_kmh_min = 60\n"
      "velocity_kmh_max = 120\n"
      "tagged_velocity_kmh_min = 100\n"
      "tagged_velocity_kmh_max = 120\n"
      "dqn.episodes = 3\n"
      "dqn.warmup = 50\n"
      "dqn.hidden1 = 16\n"
      "dqn.hidden2 = 16\n"
      "dqn.replay_capacity = 2000\n"
      "seed = 5\n");
  return ExperimentConfig::from_config(cfg);
}

TEST_CASE("policy names round-trip") {
  for (Policy p : {Policy::GoldOnly, Policy::WalshOnly, Policy::KasamiOnly, Policy::HybridNoAI,
                   Policy::DrlConventional, Policy::HybridDqn, Policy::NoDqnPower,
                   Policy::NoDqnSequence, Policy::NoGold, Policy::NoWalsh})
    CHECK(experiments::policy_from_name(experiments::policy_name(p)) == p);
  CHECK_THROWS_AS(experiments::policy_from_name("nonsense"), std::invalid_argument);
}

TEST_CASE("run_scenario: same policy and seed reproduce identical metrics") {
  const auto cfg = smoke_config();
  const std::uint64_t seeds[] = {42};
  const auto a = experiments::run_scenario(Policy::GoldOnly, cfg, seeds);
  const auto b = experiments::run_scenario(Policy::GoldOnly, cfg, seeds);
  REQUIRE(a.size() == 1);
  CHECK(experiments::run_metrics_to_csv(a[0]) == experiments::run_metrics_to_csv(b[0]));
}

TEST_CASE("run_scenario: infinite margin reports n/a HSR and zero attempts") {
  auto cfg = smoke_config();
  cfg.env.scenario.ho_margin_db = std::numeric_limits<double>::infinity();
  const std::uint64_t seeds[] = {7};
  const auto runs = experiments::run_scenario(Policy::GoldOnly, cfg, seeds);
  CHECK(runs[0].total_attempts() == 0);
  CHECK(std::isnan(runs[0].aggregate_hsr()));
  const auto csv = experiments::run_metrics_to_csv(runs[0]);
  CHECK(csv.find("n/a") != std::string::npos);
}

TEST_CASE("run_scenario validates inputs") {
  const auto cfg = smoke_config();
  CHECK_THROWS_AS(experiments::run_scenario(Policy::GoldOnly, cfg, {}), std::invalid_argument);
  const std::uint64_t seeds[] = {1};
  // DQN arm without a checkpoint
  CHECK_THROWS_AS(experiments::run_scenario(Policy::HybridDqn, cfg, seeds),
                  std::invalid_argument);
}

TEST_CASE("baseline arms never touch the DQN") {
  const auto cfg = smoke_config();
  Rng rng(3);
  dqn::QNetwork net({rl::kStateDim, 8, 4}, 0.0, rng);
  const auto before = net.save_text();
  const std::uint64_t seeds[] = {9, 10};
  for (Policy p : {Policy::GoldOnly, Policy::WalshOnly, Policy::KasamiOnly, Policy::HybridNoAI})
    experiments::run_scenario(p, cfg, seeds, &net); // pointer present but must stay unused
  CHECK(net.save_text() == before);
}

TEST_CASE("training runs and its checkpoint evaluates") {
  const auto cfg = smoke_config();
  const auto trained = experiments::train_policy(Policy::HybridDqn, cfg, 11);
  CHECK(trained.episode_rewards.size() == 3);
  const std::uint64_t seeds[] = {3};
  const auto runs = experiments::run_scenario(Policy::HybridDqn, cfg, seeds, &trained.network);
  CHECK(runs[0].reward.size() == static_cast<std::size_t>(cfg.eval_episodes));
  CHECK_THROWS_AS(experiments::train_policy(Policy::GoldOnly, cfg, 1), std::invalid_argument);
}

TEST_CASE("training is reproducible bit for bit") {
  const auto cfg = smoke_config();
  const auto a = experiments::train_policy(Policy::HybridDqn, cfg, 21);
  const auto b = experiments::train_policy(Policy::HybridDqn, cfg, 21);
  CHECK(a.network.save_text() == b.network.save_text());
  CHECK(a.episode_rewards == b.episode_rewards);
}

TEST_CASE("velocity sweep: one point per speed, empty speeds rejected") {
  const auto cfg = smoke_config();
  const double speeds[] = {3.0, 30.0, 60.0, 120.0};
  const auto points = experiments::velocity_sweep(Policy::GoldOnly, speeds, cfg, 2, "");
  REQUIRE(points.size() == 4);
  for (std::size_t i = 0; i < points.size(); ++i) CHECK(points[i].speed_kmh == speeds[i]);
  CHECK_THROWS_AS(experiments::velocity_sweep(Policy::GoldOnly, {}, cfg, 2, ""),
                  std::invalid_argument);
}

TEST_CASE("faster users attempt more handovers") {
  auto cfg = smoke_config();
  cfg.eval_episodes = 4;
  const double speeds[] = {3.0, 120.0};
  const auto points = experiments::velocity_sweep(Policy::GoldOnly, speeds, cfg, 4, "");
  CHECK(points[1].mean_attempts_per_episode > points[0].mean_attempts_per_episode);
}

TEST_CASE("ablation suite: full system exactly once, power variant locked to uniform") {
  auto cfg = smoke_config();
  const auto summary = experiments::suite_ablation(cfg, 2, "");
  REQUIRE(summary.rows.size() == 5);
  int full_count = 0;
  for (const auto& row : summary.rows)
    if (row.policy == Policy::HybridDqn) ++full_count;
  CHECK(full_count == 1);
  CHECK(summary.rows.front().policy == Policy::HybridDqn);

  // the NoDqnPower variant has no power choices and runs the uniform preset
  const auto setup = experiments::make_policy_setup(Policy::NoDqnPower, cfg);
  CHECK(setup.control.profile_choices == 1);
  CHECK(setup.control.baseline_profile == 0);
  const auto uniform = net::power_profile(6, setup.control.baseline_profile);
  for (double a : uniform) CHECK(a == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("hybrid pool couplings: same-cell rows are orthogonal at zero lag") {
  const auto cfg = smoke_config();
  const auto setup = experiments::make_policy_setup(Policy::HybridDqn, cfg);
  const auto& pool = setup.pool;
  const int rows = cfg.hybrid_rows_per_cell;
  // same-cell pairs: synchronous coupling exactly zero; cross-cell nonzero
  CHECK(pool.sync(0 * rows + 0, 0 * rows + 1) == doctest::Approx(0.0));
  CHECK(pool.sync(3 * rows + 2, 3 * rows + 5) == doctest::Approx(0.0));
  CHECK(pool.async(0 * rows + 0, 1 * rows + 0) > 0.0);
}

TEST_CASE("compare summary JSON has the six arms and the statistics blocks") {
  auto cfg = smoke_config();
  cfg.schedule.episodes = 2;
  cfg.eval_episodes = 2;
  const auto summary = experiments::suite_compare(cfg, 3, "");
  REQUIRE(summary.arms.size() == 6);
  const auto json = experiments::compare_summary_to_json(summary);
  for (const char* name : {"gold_only", "walsh_only", "kasami_only", "hybrid_no_ai",
                           "drl_conventional", "hybrid_dqn", "anova_hsr", "config_hash"})
    CHECK(json.find(name) != std::string::npos);
  CHECK(summary.effects.size() == 5);
}
