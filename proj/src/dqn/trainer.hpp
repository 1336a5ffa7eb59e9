#pragma once

#include <functional>

#include "dqn/network.hpp"
#include "dqn/replay.hpp"
#include "rlenv/env.hpp"

namespace hynoma::dqn {

struct TrainSchedule {
  double learning_rate = 0.001;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.4; // exponential decay over this share of episodes
  long target_update_period = 1000;
  bool target_update_by_episodes = false; // step-based by default
  int batch_size = 32;
  int episodes = 500;
  int warmup_transitions = 1000;
  int train_every_ticks = 1;
  int replay_capacity = 50000;
  double per_alpha = 0.6;
  double per_beta_start = 0.4;
  double per_beta_end = 1.0;
  double per_epsilon = 1e-3;
  double huber_delta = 1.0;
  double dropout = 0.1;
  int hidden1 = 64;
  int hidden2 = 64;
  // nominal rate decays as lr / (1 + step / (tau_frac * total_steps)), which
  // keeps the stochastic-approximation step-size conditions satisfiable
  double lr_decay_tau_frac = 0.33;

  double epsilon_at(int episode) const;
  double beta_at(long step, long total_steps) const;
  double lr_at(long step, long total_steps) const;
};

// One TD update: sample a prioritized batch, build targets
// y = r + gamma * max_a' Q_target(s', a') (y = r on terminal transitions),
// take an importance-weighted Huber SGD step, refresh the sampled leaves'
// priorities with |TD error|, and copy the target network every
// `target_update_period` calls. Returns the batch loss.
double train_step(QNetwork& online, QNetwork& target, ReplayBuffer& buffer,
                  const TrainSchedule& schedule, long& step_counter, double beta, Rng& rng,
                  double lr_override = -1.0);

struct EpisodeStats {
  int episode = 0;
  double reward_sum = 0.0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
  long train_steps = 0;
  net::Simulator::Counters counters;
  double mean_interference_w = 0.0;
  double mean_rate_se = 0.0;
};

struct TrainResult {
  QNetwork network;
  std::vector<double> episode_rewards;
  std::vector<EpisodeStats> episodes;
};

// Full training loop over the environment; deterministic per seed.
class Trainer {
public:
  using EpisodeCallback = std::function<void(const EpisodeStats&)>;

  Trainer(rl::Environment& env, TrainSchedule schedule, std::uint64_t seed);

  TrainResult run(const EpisodeCallback& on_episode = nullptr);

  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }

private:
  rl::Environment& env_;
  TrainSchedule schedule_;
  QNetwork online_;
  QNetwork target_;
  ReplayBuffer buffer_;
  Rng rng_;
  std::uint64_t seed_ = 0;
  long step_counter_ = 0;
};

// Tabular Q-learning (the network replaced by a lookup table); used to check
// the update rule against a value-iteration fixed point on small MDPs.
class TabularQLearner {
public:
  TabularQLearner(int states, int actions);

  double& q(int s, int a) { return table_[s * actions_ + a]; }
  double q(int s, int a) const { return table_[s * actions_ + a]; }
  int best_action(int s) const;
  double max_q(int s) const;

  // Q(s,a) += lr * (r + gamma * max Q(s',.) - Q(s,a)); terminal drops the bootstrap
  void update(int s, int a, double r, int next_s, bool done, double lr, double gamma);

  int states() const { return states_; }
  int actions() const { return actions_; }

private:
  int states_;
  int actions_;
  std::vector<double> table_;
};

} // namespace hynoma::dqn
