#include "rlenv/env.hpp"

#include <cmath>
#include <stdexcept>

namespace hynoma::rl {

static double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

int action_space_size(const ControlSpec& control) {
  return control.sequence_choices * control.profile_choices * 3;
}

int flatten_action(const EnvAction& a, const ControlSpec& control) {
  if (a.sequence_choice < 0 || a.sequence_choice >= control.sequence_choices ||
      a.profile_choice < 0 || a.profile_choice >= control.profile_choices ||
      a.margin_step < -1 || a.margin_step > 1)
    throw std::invalid_argument("action outside the control spec");
  return (a.sequence_choice * control.profile_choices + a.profile_choice) * 3 +
         (a.margin_step + 1);
}

EnvAction unflatten_action(int id, const ControlSpec& control) {
  if (id < 0 || id >= action_space_size(control))
    throw std::invalid_argument("flat action id out of range");
  EnvAction a;
  a.margin_step = id % 3 - 1;
  id /= 3;
  a.profile_choice = id % control.profile_choices;
  a.sequence_choice = id / control.profile_choices;
  return a;
}

RewardBreakdown assemble_reward_terms(const RewardWeights& w, double throughput01,
                                      double interference01, bool failure, double qos01,
                                      double energy01) {
  RewardBreakdown r;
  r.throughput = throughput01;
  r.interference = interference01;
  r.ho_failure = failure ? 1.0 : 0.0;
  r.qos = qos01;
  r.energy = energy01;
  r.total = w.throughput * r.throughput - w.interference * r.interference -
            w.ho_failure * r.ho_failure + w.qos * r.qos - w.energy * r.energy;
  return r;
}

Environment::Environment(EnvConfig config, net::SequencePool pool,
                         AssignerFactory assigner_factory, ControlSpec control)
    : config_(std::move(config)),
      pool_(std::move(pool)),
      assigner_factory_(std::move(assigner_factory)),
      control_(std::move(control)) {
  if (!assigner_factory_) throw std::invalid_argument("environment needs an assigner factory");
  if (control_.sequence_choices < 1 || control_.profile_choices < 1 ||
      control_.profile_choices > net::power_profile_count())
    throw std::invalid_argument("invalid control spec");
  if (control_.sequence_choices > 1 && !control_.sequence_for_choice)
    throw std::invalid_argument("sequence control enabled without a choice mapping");
}

EnvState Environment::reset(std::uint64_t seed) {
  Rng master(seed ^ 0x9e3779b97f4a7c15ull);
  Rng sim_rng = master.split(1);

  sim_ = std::make_unique<net::Simulator>(config_.scenario, pool_, assigner_factory_(), sim_rng);
  for (int c = 0; c < sim_->grid().size(); ++c)
    sim_->set_cell_profile(c, control_.baseline_profile);

  Rng pick = master.split(2);
  tagged_user_ = static_cast<int>(pick.uniform_int(sim_->users().size()));
  // the controlled user runs in the stressed part of the velocity band and
  // keeps to the core grid, where the cell boundaries are
  auto& users = const_cast<std::vector<net::UserState>&>(sim_->users());
  users[tagged_user_].mobility.speed_kmh =
      pick.uniform(config_.tagged_velocity_kmh_min, config_.tagged_velocity_kmh_max);
  sim_->set_user_waypoint_bounds(tagged_user_, sim_->core_bounds());

  ticks_ = 0;
  done_ = false;
  return observe();
}

EnvState Environment::observe() const {
  if (!sim_) throw std::logic_error("observe before reset");
  const auto& u = sim_->users()[tagged_user_];
  const double interference_w = u.intra_w + u.inter_w;
  const double interference_dbm =
      interference_w > 0.0 ? phy::watts_to_dbm(interference_w) : -200.0;
  EnvState s{};
  s[0] = clip01((u.sinr_db + 20.0) / 60.0);
  s[1] = clip01((u.rsrp_serving_dbm + 120.0) / 60.0);
  s[2] = clip01(u.mobility.speed_kmh / 120.0);
  s[3] = clip01(static_cast<double>(sim_->cell_members(u.serving_cell).size()) /
                static_cast<double>(config_.scenario.group_max));
  s[4] = clip01((interference_dbm + 110.0) / 60.0);
  s[5] = u.qos_ok ? 1.0 : 0.0;
  s[6] = clip01(u.margin_db / config_.scenario.margin_max_db);
  for (double v : s)
    if (std::isnan(v)) throw std::logic_error("NaN escaped into the state");
  return s;
}

RewardBreakdown Environment::assemble_reward(const net::TickEvents& events) const {
  const auto& sim = *sim_;
  const auto& u = sim.users()[tagged_user_];
  const auto& group = sim.cell_members(u.serving_cell);
  const int n = static_cast<int>(group.size());

  double sum_rate = 0.0;
  int qos_count = 0;
  for (int id : group) {
    sum_rate += sim.users()[id].rate_se;
    if (sim.users()[id].qos_ok) ++qos_count;
  }
  const double thr01 =
      n > 0 ? clip01(sum_rate / (config_.reward_norm_se_per_user * n)) : 0.0;
  const double qos01 = n > 0 ? static_cast<double>(qos_count) / n : 0.0;

  const double interference_w = u.intra_w + u.inter_w;
  const double interference_dbm =
      interference_w > 0.0 ? phy::watts_to_dbm(interference_w) : -200.0;
  const double intf01 = clip01((interference_dbm + 110.0) / 60.0);

  bool tagged_failure = false;
  for (int rec : events.failures)
    if (sim.records()[rec].user_id == tagged_user_) tagged_failure = true;

  // energy proxy: share of power allocated beyond the uniform split
  double energy01 = 0.0;
  if (n > 1) {
    const auto alpha = net::power_profile(n, sim.cell_profile(u.serving_cell));
    double excess = 0.0;
    for (double a : alpha) excess += std::max(0.0, a - 1.0 / n);
    energy01 = clip01(excess / (1.0 - 1.0 / n));
  }

  return assemble_reward_terms(config_.weights, thr01, intf01, tagged_failure, qos01, energy01);
}

StepResult Environment::step(const EnvAction& action) {
  if (done_) throw std::logic_error("step after episode end");
  auto& sim = *sim_;
  const auto& u = sim.users()[tagged_user_];

  if (control_.sequence_choices > 1) {
    if (action.sequence_choice < 0 || action.sequence_choice >= control_.sequence_choices)
      throw std::invalid_argument("sequence choice out of range");
    const int wanted =
        control_.sequence_for_choice(tagged_user_, u.serving_cell, action.sequence_choice);
    // a code already granted to a cellmate is not available; the request is
    // ignored and the current assignment stays
    bool held = false;
    for (int id : sim.cell_members(u.serving_cell))
      if (id != tagged_user_ && sim.users()[id].seq_id == wanted) held = true;
    if (!held) sim.set_user_sequence(tagged_user_, wanted);
  }
  if (control_.profile_choices > 1) {
    if (action.profile_choice < 0 || action.profile_choice >= control_.profile_choices)
      throw std::invalid_argument("profile choice out of range");
    sim.set_cell_profile(u.serving_cell, action.profile_choice);
  }
  if (control_.margin_control && action.margin_step != 0)
    sim.adjust_margin(tagged_user_, action.margin_step * config_.margin_step_db);

  const auto events = sim.tick();
  ++ticks_;
  StepResult out;
  out.reward = assemble_reward(events);
  out.done = ticks_ >= config_.episode_ticks;
  done_ = out.done;
  if (done_) sim.finalize_pending(); // keep the accounting identity exact at the horizon
  out.state = observe();
  return out;
}

StepResult Environment::step(int flat_action_id) {
  return step(unflatten_action(flat_action_id, control_));
}

} // namespace hynoma::rl
