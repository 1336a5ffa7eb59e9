#pragma once

#include <array>
#include <functional>
#include <memory>

#include "netsim/simulator.hpp"

namespace hynoma::rl {

// Normalized observation for the controlled user, every component in [0, 1]:
// sinr, rsrp, velocity, serving-cell load, interference, qos flag, margin.
using EnvState = std::array<double, 7>;
inline constexpr int kStateDim = 7;

struct EnvAction {
  int sequence_choice = 0;  // [0, S)
  int profile_choice = 0;   // [0, P)
  int margin_step = 0;      // -1, 0, +1 (dB)
};

struct RewardWeights {
  double throughput = 1.0;
  double interference = 0.5;
  double ho_failure = 2.0;
  double qos = 0.5;
  double energy = 0.2;

  double magnitude_sum() const {
    return throughput + interference + ho_failure + qos + energy;
  }
};

struct RewardBreakdown {
  double throughput = 0.0;   // sum-rate of the serving group / R_norm, capped at 1
  double interference = 0.0; // normalized dBm level, [0, 1]
  double ho_failure = 0.0;   // 1 when a failure touched the controlled user this tick
  double qos = 0.0;          // satisfied fraction of the serving group
  double energy = 0.0;       // power-skew proxy beyond the uniform share, [0, 1]
  double total = 0.0;
};

// What the agent is allowed to touch. Locked dimensions collapse to a single
// choice, which is how the ablation variants are built.
struct ControlSpec {
  int sequence_choices = 1;
  int profile_choices = 1;
  bool margin_control = false;
  int baseline_profile = 2;
  // maps the agent's sequence choice to a pool id for (user, serving cell);
  // required when sequence_choices > 1
  std::function<int(int user_id, int cell_id, int choice)> sequence_for_choice;
};

struct EnvConfig {
  net::ScenarioParams scenario;
  RewardWeights weights;
  int episode_ticks = 200;
  double margin_step_db = 1.0;
  // controlled user speed band (mobility stress)
  double tagged_velocity_kmh_min = 60.0;
  double tagged_velocity_kmh_max = 120.0;
  // throughput normalization: R_norm = reward_norm_se_per_user * group size
  double reward_norm_se_per_user = 2.0;
};

int action_space_size(const ControlSpec& control);
int flatten_action(const EnvAction& a, const ControlSpec& control);
EnvAction unflatten_action(int id, const ControlSpec& control);

struct StepResult {
  EnvState state{};
  RewardBreakdown reward;
  bool done = false;
};

// Builds a fresh attach-rule assigner per episode so that any state the rule
// keeps (round-robin counters) cannot leak across resets.
using AssignerFactory = std::function<net::Simulator::Assigner()>;

// Episodic wrapper around the simulator. One tagged user is controlled; the
// rest follow the scenario's static policy. Trajectories are a deterministic
// function of (seed, action sequence).
class Environment {
public:
  Environment(EnvConfig config, net::SequencePool pool, AssignerFactory assigner_factory,
              ControlSpec control);

  EnvState reset(std::uint64_t seed);
  StepResult step(const EnvAction& action);
  StepResult step(int flat_action_id);

  bool done() const { return done_; }
  int tagged_user() const { return tagged_user_; }
  long current_tick() const { return sim_ ? sim_->tick_count() : 0; }
  const net::Simulator& sim() const { return *sim_; }
  net::Simulator& sim_mutable() { return *sim_; }
  const ControlSpec& control() const { return control_; }
  const EnvConfig& config() const { return config_; }

  EnvState observe() const;

private:
  RewardBreakdown assemble_reward(const net::TickEvents& events) const;

  EnvConfig config_;
  net::SequencePool pool_;
  AssignerFactory assigner_factory_;
  ControlSpec control_;
  std::unique_ptr<net::Simulator> sim_;
  int tagged_user_ = 0;
  int ticks_ = 0;
  bool done_ = true;
};

// Pure reward assembly, exposed for tests.
RewardBreakdown assemble_reward_terms(const RewardWeights& w, double throughput01,
                                      double interference01, bool failure, double qos01,
                                      double energy01);

} // namespace hynoma::rl
