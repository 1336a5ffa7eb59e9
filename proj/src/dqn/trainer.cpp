#include "dqn/trainer.hpp"

#include <cmath>
#include <stdexcept>

namespace hynoma::dqn {

double TrainSchedule::epsilon_at(int episode) const {
  const double horizon = std::max(1.0, epsilon_decay_fraction * episodes);
  if (episode >= horizon) return epsilon_end;
  // exponential interpolation from start to end over the decay window
  const double t = static_cast<double>(episode) / horizon;
  return epsilon_start * std::pow(epsilon_end / epsilon_start, t);
}

double TrainSchedule::beta_at(long step, long total_steps) const {
  if (total_steps <= 0) return per_beta_end;
  const double t = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return per_beta_start + (per_beta_end - per_beta_start) * t;
}

double TrainSchedule::lr_at(long step, long total_steps) const {
  if (lr_decay_tau_frac <= 0.0 || total_steps <= 0) return learning_rate;
  const double tau = lr_decay_tau_frac * static_cast<double>(total_steps);
  return learning_rate / (1.0 + static_cast<double>(step) / tau);
}

double train_step(QNetwork& online, QNetwork& target, ReplayBuffer& buffer,
                  const TrainSchedule& schedule, long& step_counter, double beta, Rng& rng,
                  double lr_override) {
  SampledBatch batch = buffer.sample(schedule.batch_size, beta, rng);

  const std::size_t k = batch.transitions.size();
  std::vector<std::vector<double>> states(k);
  std::vector<int> actions(k);
  std::vector<double> targets(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Transition& t = batch.transitions[i];
    states[i] = t.state;
    actions[i] = t.action;
    double y = t.reward;
    if (!t.done) {
      const auto q_next = target.forward(t.next_state);
      y += schedule.gamma * q_next[argmax_action(q_next)];
    }
    targets[i] = y;
  }

  auto grads = online.zero_gradients();
  std::vector<double> td;
  const double loss = online.loss_and_gradients(states, actions, targets, batch.is_weights,
                                                schedule.huber_delta, grads,
                                                online.dropout() > 0.0 ? &rng : nullptr, &td);
  online.sgd_step(grads, lr_override > 0.0 ? lr_override : schedule.learning_rate);

  for (std::size_t i = 0; i < k; ++i)
    buffer.update_priority(batch.indices[i], std::abs(td[i]));

  ++step_counter;
  if (!schedule.target_update_by_episodes &&
      step_counter % schedule.target_update_period == 0)
    target = online;
  return loss;
}

Trainer::Trainer(rl::Environment& env, TrainSchedule schedule, std::uint64_t seed)
    : env_(env),
      schedule_(schedule),
      buffer_(schedule.replay_capacity, schedule.per_alpha, schedule.per_epsilon),
      rng_(Rng(seed).split(0x7261696eull)),
      seed_(seed) {
  const int actions = rl::action_space_size(env.control());
  const std::vector<int> sizes = {rl::kStateDim, schedule_.hidden1, schedule_.hidden2, actions};
  online_ = QNetwork(sizes, schedule_.dropout, rng_);
  target_ = online_;
}

TrainResult Trainer::run(const EpisodeCallback& on_episode) {
  TrainResult result;
  const long total_steps =
      static_cast<long>(schedule_.episodes) * env_.config().episode_ticks;

  for (int ep = 0; ep < schedule_.episodes; ++ep) {
    const double eps = schedule_.epsilon_at(ep);
    std::uint64_t ep_state = seed_ + 0xe0000000ull + static_cast<std::uint64_t>(ep);
    auto state_arr = env_.reset(splitmix64(ep_state));
    std::vector<double> state(state_arr.begin(), state_arr.end());

    EpisodeStats stats;
    stats.episode = ep;
    stats.epsilon = eps;
    double loss_sum = 0.0;
    long losses = 0;
    int tick = 0;

    while (!env_.done()) {
      const int action = select_action(online_, state, eps, rng_);
      const auto step = env_.step(action);
      std::vector<double> next(step.state.begin(), step.state.end());

      Transition t;
      t.state = state;
      t.action = action;
      t.reward = step.reward.total;
      t.next_state = next;
      t.done = step.done;
      buffer_.add(std::move(t));

      if (buffer_.size() >= schedule_.warmup_transitions &&
          ++tick % schedule_.train_every_ticks == 0) {
        const double beta = schedule_.beta_at(step_counter_, total_steps);
        const double lr = schedule_.lr_at(step_counter_, total_steps);
        loss_sum +=
            train_step(online_, target_, buffer_, schedule_, step_counter_, beta, rng_, lr);
        ++losses;
      }
      stats.reward_sum += step.reward.total;
      state = std::move(next);
    }

    if (schedule_.target_update_by_episodes &&
        (ep + 1) % schedule_.target_update_period == 0)
      target_ = online_;

    stats.mean_loss = losses ? loss_sum / static_cast<double>(losses) : 0.0;
    stats.train_steps = step_counter_;
    stats.counters = env_.sim().counters();
    stats.mean_interference_w = env_.sim().mean_total_interference_w();
    stats.mean_rate_se = env_.sim().mean_rate_se();
    result.episode_rewards.push_back(stats.reward_sum);
    result.episodes.push_back(stats);
    if (on_episode) on_episode(stats);
  }
  result.network = online_;
  return result;
}

TabularQLearner::TabularQLearner(int states, int actions)
    : states_(states), actions_(actions), table_(static_cast<std::size_t>(states) * actions, 0.0) {
  if (states <= 0 || actions <= 0) throw std::invalid_argument("tabular dims must be positive");
}

int TabularQLearner::best_action(int s) const {
  int best = 0;
  for (int a = 1; a < actions_; ++a)
    if (q(s, a) > q(s, best)) best = a;
  return best;
}

double TabularQLearner::max_q(int s) const { return q(s, best_action(s)); }

void TabularQLearner::update(int s, int a, double r, int next_s, bool done, double lr,
                             double gamma) {
  const double bootstrap = done ? 0.0 : gamma * max_q(next_s);
  const double td = r + bootstrap - q(s, a);
  q(s, a) += lr * td;
}

} // namespace hynoma::dqn
