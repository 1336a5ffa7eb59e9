#pragma once

#include <string>

#include "common/config.hpp"
#include "dqn/trainer.hpp"
#include "rlenv/env.hpp"

namespace hynoma::experiments {

// The six comparison arms plus the ablation variants.
enum class Policy {
  GoldOnly,
  WalshOnly,
  KasamiOnly,
  HybridNoAI,
  DrlConventional,
  HybridDqn,
  NoDqnPower,
  NoDqnSequence,
  NoGold,
  NoWalsh,
};

const char* policy_name(Policy p);
Policy policy_from_name(const std::string& name);
bool policy_uses_dqn(Policy p);
bool policy_is_ablation(Policy p);

struct ExperimentConfig {
  rl::EnvConfig env;
  dqn::TrainSchedule schedule;
  int eval_episodes = 10;
  int gold_m = 5;
  int walsh_order = 32;
  int kasami_m = 6;
  int action_sequences = 8; // S
  int action_profiles = 5;  // P
  int hybrid_rows_per_cell = 8;
  std::uint64_t base_seed = 1;
  int jobs = 1;
  std::string config_hash; // hash of the source key-value config

  static ExperimentConfig from_config(const Config& cfg);
};

// Everything the environment needs to embody one policy arm.
struct PolicySetup {
  net::SequencePool pool;
  rl::AssignerFactory assigner_factory;
  rl::ControlSpec control;
};

PolicySetup make_policy_setup(Policy policy, const ExperimentConfig& cfg);

rl::Environment make_environment(Policy policy, const ExperimentConfig& cfg);

} // namespace hynoma::experiments
