#include "netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqlib/correlation.hpp"

namespace hynoma::net {

const char* outcome_name(HandoverOutcome o) {
  switch (o) {
    case HandoverOutcome::Success: return "success";
    case HandoverOutcome::FailureRLF: return "rlf";
    case HandoverOutcome::FailurePingPong: return "pingpong";
  }
  return "?";
}

const char* inter_coupling_name(InterCoupling m) {
  return m == InterCoupling::MeanSquareOffZero ? "meansq_offzero" : "peak_offzero";
}

InterCoupling inter_coupling_from_name(const std::string& name) {
  if (name == "meansq_offzero") return InterCoupling::MeanSquareOffZero;
  if (name == "peak_offzero") return InterCoupling::PeakOffZero;
  throw std::invalid_argument("unknown inter_coupling model: " + name);
}

SequencePool SequencePool::build(std::vector<seq::ChipSequence> entries, InterCoupling model) {
  SequencePool pool;
  pool.entries = std::move(entries);
  const int n = pool.size();
  pool.rho2_sync.assign(static_cast<std::size_t>(n) * n, 1.0);
  pool.rho2_async.assign(static_cast<std::size_t>(n) * n, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = seq::coupling_sync(pool.entries[i], pool.entries[j]);
      const double a = model == InterCoupling::MeanSquareOffZero
                           ? seq::coupling_async_meansq(pool.entries[i], pool.entries[j])
                           : seq::coupling_async_peak(pool.entries[i], pool.entries[j]);
      pool.rho2_sync[i * n + j] = pool.rho2_sync[j * n + i] = s;
      pool.rho2_async[i * n + j] = pool.rho2_async[j * n + i] = a;
    }
  }
  return pool;
}

std::vector<double> power_profile(int group_size, int profile_index) {
  static const double ratios[] = {1.0, 1.5, 2.0, 2.5, 3.0};
  if (profile_index < 0 || profile_index >= power_profile_count())
    throw std::invalid_argument("power profile index out of range");
  if (group_size <= 0) return {};
  const double r = ratios[profile_index];
  std::vector<double> alpha(group_size);
  double sum = 0.0;
  for (int k = 0; k < group_size; ++k) {
    alpha[k] = std::pow(r, group_size - 1 - k);
    sum += alpha[k];
  }
  for (double& a : alpha) a /= sum;
  return alpha;
}

int power_profile_count() { return 5; }

bool a3_condition(double rsrp_target_dbm, double rsrp_serving_dbm, double margin_db) {
  return rsrp_target_dbm > rsrp_serving_dbm + margin_db;
}

Simulator::Simulator(const ScenarioParams& params, SequencePool pool, Assigner assigner, Rng rng)
    : params_(params),
      grid_(build_grid(params.rings, params.isd_m)),
      pool_(std::move(pool)),
      assigner_(std::move(assigner)),
      rng_(rng),
      bounds_(grid_.bounds()) {
  bounds_.min_x -= params.mobility_pad_m;
  bounds_.min_y -= params.mobility_pad_m;
  bounds_.max_x += params.mobility_pad_m;
  bounds_.max_y += params.mobility_pad_m;
  if (!assigner_) throw std::invalid_argument("simulator needs a sequence assigner");
  members_.resize(grid_.size());
  cell_profile_.assign(grid_.size(), 2); // moderate skew as the static default
  place_users();
  sample_all_channels();
  compute_rates();
}

void Simulator::place_users() {
  const int total = grid_.size() * params_.users_per_cell;
  users_.reserve(total);
  for (int c = 0; c < grid_.size(); ++c) {
    for (int k = 0; k < params_.users_per_cell; ++k) {
      UserState u;
      u.id = static_cast<int>(users_.size());
      // uniform within a disk around the cell center keeps initial load balanced
      const double ang = rng_.uniform(0.0, 2.0 * M_PI);
      const double rad = params_.isd_m / 2.0 * std::sqrt(rng_.uniform());
      u.mobility.x = grid_.cells[c].x + rad * std::cos(ang);
      u.mobility.y = grid_.cells[c].y + rad * std::sin(ang);
      u.mobility.speed_kmh = rng_.uniform(params_.velocity_kmh_min, params_.velocity_kmh_max);
      u.serving_cell = grid_.nearest_cell(u.mobility.x, u.mobility.y);
      u.margin_db = params_.ho_margin_db;
      u.rsrp_filters.assign(grid_.size(), phy::RsrpFilter{params_.rsrp_filter_coeff});
      u.fading_power.assign(grid_.size(), 1.0);
      u.target_suppressed_until.assign(grid_.size(), -1);
      u.waypoint_bounds = bounds_;
      users_.push_back(std::move(u));
    }
  }
  for (auto& u : users_) {
    u.seq_id = assigner_(*this, u.id, u.serving_cell);
    members_[u.serving_cell].push_back(u.id);
  }
}

void Simulator::sample_all_channels() {
  for (auto& u : users_) {
    for (int c = 0; c < grid_.size(); ++c) {
      const double d = distance(grid_.cells[c], u.mobility.x, u.mobility.y);
      const auto st = phy::sample_channel(d, params_.channel, rng_);
      u.fading_power[c] = std::norm(st.fading);
      u.rsrp_filters[c].update(u.fading_power[c]);
    }
  }
}

double Simulator::user_cell_distance(int user_id, int cell_id) const {
  const auto& u = users_[user_id];
  return std::max(distance(grid_.cells[cell_id], u.mobility.x, u.mobility.y),
                  params_.channel.d_min_m);
}

double Simulator::smoothed_rsrp_dbm(const UserState& u, int cell) const {
  const double pl = phy::pathloss_linear(user_cell_distance(u.id, cell), params_.channel);
  return phy::rsrp_dbm(pl, u.rsrp_filters[cell].state, params_.tx_power_w());
}

double Simulator::inter_interference_w(const UserState& u) const {
  // Interference is evaluated on the fading expectation (E|g|^2 = 1); the
  // desired signal carries the instantaneous fade.
  const double iso = phy::db_to_linear(params_.inter_isolation_db);
  double acc = 0.0;
  for (int c = 0; c < grid_.size(); ++c) {
    if (c == u.serving_cell || members_[c].empty()) continue;
    const double pl = phy::pathloss_linear(user_cell_distance(u.id, c), params_.channel);
    const auto alpha = power_profile(static_cast<int>(members_[c].size()), cell_profile_[c]);
    double coupling = 0.0;
    for (std::size_t k = 0; k < members_[c].size(); ++k)
      coupling += alpha[k] * pool_.async(u.seq_id, users_[members_[c][k]].seq_id);
    acc += pl * params_.tx_power_w() * coupling * iso;
  }
  return acc;
}

void Simulator::move_user(int user_id, int from_cell, int to_cell) {
  auto& src = members_[from_cell];
  src.erase(std::remove(src.begin(), src.end(), user_id), src.end());
  members_[to_cell].push_back(user_id);
  users_[user_id].serving_cell = to_cell;
}

void Simulator::set_user_sequence(int user_id, int seq_id) {
  if (seq_id < 0 || seq_id >= pool_.size())
    throw std::invalid_argument("sequence id outside the pool");
  users_.at(user_id).seq_id = seq_id;
}

void Simulator::set_cell_profile(int cell_id, int profile_index) {
  if (profile_index < 0 || profile_index >= power_profile_count())
    throw std::invalid_argument("power profile index out of range");
  cell_profile_.at(cell_id) = profile_index;
}

void Simulator::adjust_margin(int user_id, double delta_db) {
  auto& u = users_.at(user_id);
  u.margin_db = std::clamp(u.margin_db + delta_db, params_.margin_min_db, params_.margin_max_db);
}

void Simulator::set_user_waypoint_bounds(int user_id, const Rect& bounds) {
  auto& u = users_.at(user_id);
  u.waypoint_bounds = bounds;
  // a pending waypoint outside the new box is replanned on the next step
  if (u.mobility.waypoint_x < bounds.min_x || u.mobility.waypoint_x > bounds.max_x ||
      u.mobility.waypoint_y < bounds.min_y || u.mobility.waypoint_y > bounds.max_y)
    u.mobility.has_waypoint = false;
}

Rect Simulator::core_bounds() const { return grid_.bounds(); }

void Simulator::start_execution(UserState& u, int target, TickEvents& events) {
  if (target == u.serving_cell) throw std::invalid_argument("handover target equals source");

  HandoverRecord rec;
  rec.tick = tick_;
  rec.user_id = u.id;
  rec.source_cell = u.serving_cell;
  rec.target_cell = target;
  rec.margin_db = u.margin_db;

  if (static_cast<int>(members_[target].size()) >= params_.group_max) {
    // admission control: cell full, the attempt fails and the user stays put
    rec.blocked = true;
    rec.outcome = HandoverOutcome::FailureRLF;
    rec.finalized = true;
    rec.completion_tick = tick_;
    records_.push_back(rec);
    events.failures.push_back(static_cast<int>(records_.size()) - 1);
    u.a3_target = -1;
    u.a3_count = 0;
    u.cooldown = params_.ho_block_cooldown_ticks;
    u.target_suppressed_until[target] = tick_ + params_.ho_block_suppress_ticks;
    return;
  }

  // returning to the previous source shortly after completion turns that
  // earlier handover into a ping-pong
  if (u.last_record >= 0 && target == u.last_source &&
      tick_ - u.last_completion_tick <= params_.t_pp_ticks) {
    auto& prev = records_[u.last_record];
    if (prev.outcome == HandoverOutcome::Success) {
      prev.outcome = HandoverOutcome::FailurePingPong;
      events.failures.push_back(u.last_record);
    }
  }

  records_.push_back(rec);
  u.executing = true;
  u.exec_source = u.serving_cell;
  u.exec_target = target;
  u.exec_ticks_left = params_.t_exec_ticks;
  u.exec_any_tick_ok = false;
  u.exec_record = static_cast<int>(records_.size()) - 1;
  u.a3_target = -1;
  u.a3_count = 0;

  // data plane switches at execution start; the window decides the outcome
  move_user(u.id, u.serving_cell, target);
  u.seq_id = assigner_(*this, u.id, target);
}

void Simulator::finish_execution(UserState& u, TickEvents& events) {
  auto& rec = records_[u.exec_record];
  rec.finalized = true;
  rec.completion_tick = tick_;
  if (u.exec_any_tick_ok) {
    rec.outcome = HandoverOutcome::Success;
    events.successes.push_back(u.exec_record);
  } else {
    rec.outcome = HandoverOutcome::FailureRLF;
    events.failures.push_back(u.exec_record);
  }
  u.last_completion_tick = tick_;
  u.last_source = u.exec_source;
  u.last_record = u.exec_record;
  u.executing = false;
  u.exec_target = -1;
  u.exec_source = -1;
  u.exec_record = -1;
}

void Simulator::update_handover_machine(TickEvents& events) {
  for (auto& u : users_) {
    if (u.executing) {
      if (u.sinr_db >= params_.gamma_fail_db) u.exec_any_tick_ok = true;
      if (--u.exec_ticks_left <= 0) finish_execution(u, events);
      continue;
    }
    if (u.cooldown > 0) {
      --u.cooldown;
      continue;
    }
    if (std::isinf(u.margin_db)) continue; // degenerate margin: handover disabled

    // strongest non-serving cell on smoothed RSRP; cells that just refused
    // this user on admission stay quarantined for a while
    int best = -1;
    double best_rsrp = -1e300;
    for (int c = 0; c < grid_.size(); ++c) {
      if (c == u.serving_cell) continue;
      if (u.target_suppressed_until[c] > tick_) continue;
      const double r = smoothed_rsrp_dbm(u, c);
      if (r > best_rsrp) {
        best_rsrp = r;
        best = c;
      }
    }
    if (best < 0) continue;
    const double serving = smoothed_rsrp_dbm(u, u.serving_cell);
    u.rsrp_serving_dbm = serving;
    if (a3_condition(best_rsrp, serving, u.margin_db)) {
      if (u.a3_target == best) {
        ++u.a3_count;
      } else {
        u.a3_target = best;
        u.a3_count = 1;
      }
      if (u.a3_count >= params_.ttt_ticks) start_execution(u, best, events);
    } else {
      u.a3_target = -1;
      u.a3_count = 0;
    }
  }
}

void Simulator::compute_rates() {
  const double noise = params_.noise_w();
  for (int c = 0; c < grid_.size(); ++c) {
    auto& ids = members_[c];
    if (ids.empty()) continue;

    // SIC decode order: weakest mean channel first (pathloss CSI). That user
    // holds the largest power share and is cancelled by everyone after it.
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      const double da = user_cell_distance(a, c), db = user_cell_distance(b, c);
      if (da != db) return da > db;
      return a < b;
    });

    const int n = static_cast<int>(ids.size());
    phy::NomaGroup group;
    group.user_ids = ids;
    group.alpha = power_profile(n, cell_profile_[c]);
    group.total_power_w = params_.tx_power_w();

    std::vector<double> gain(n), seq_gain(n), inter(n);
    for (int i = 0; i < n; ++i) {
      auto& u = users_[ids[i]];
      const double pl = phy::pathloss_linear(user_cell_distance(u.id, c), params_.channel);
      gain[i] = pl * u.fading_power[c];
      // alpha-weighted mean of the synchronous couplings with the users
      // decoded later; exact same residual as the per-pair sum
      double num = 0.0, den = 0.0;
      for (int k = i + 1; k < n; ++k) {
        num += group.alpha[k] * pool_.sync(u.seq_id, users_[ids[k]].seq_id);
        den += group.alpha[k];
      }
      seq_gain[i] = den > 0.0 ? std::max(num / den, 1e-12) : 1.0;
      inter[i] = inter_interference_w(u);
    }

    const auto rates = phy::sic_rate(group, gain, seq_gain, inter, noise);
    std::vector<double> residual(n + 1, 0.0);
    for (int i = n; i-- > 0;) residual[i] = residual[i + 1] + group.alpha[i];
    for (int i = 0; i < n; ++i) {
      auto& u = users_[ids[i]];
      u.rate_se = rates[i];
      u.intra_w = seq_gain[i] * gain[i] * residual[i + 1] * group.total_power_w;
      u.inter_w = inter[i];
      const double signal = gain[i] * group.alpha[i] * group.total_power_w;
      u.sinr_db = phy::linear_to_db(signal / (u.intra_w + u.inter_w + noise));
      u.qos_ok = u.rate_se >= params_.qos_min_rate_se;
      u.rsrp_serving_dbm = smoothed_rsrp_dbm(u, u.serving_cell);
      interference_accum_ += u.intra_w + u.inter_w;
      rate_accum_ += u.rate_se;
      ++accum_samples_;
    }
  }
}

TickEvents Simulator::tick() {
  ++tick_;
  TickEvents events;
  const double dt = params_.tick_s();
  for (auto& u : users_) step_mobility(u.mobility, dt, u.waypoint_bounds, rng_);
  sample_all_channels();
  update_handover_machine(events);
  compute_rates();
  return events;
}

void Simulator::finalize_pending() {
  TickEvents events;
  for (auto& u : users_)
    if (u.executing) finish_execution(u, events);
}

Simulator::Counters Simulator::counters() const {
  Counters c;
  for (const auto& r : records_) {
    if (!r.finalized) continue;
    ++c.attempts;
    switch (r.outcome) {
      case HandoverOutcome::Success: ++c.successes; break;
      case HandoverOutcome::FailureRLF: ++c.failures_rlf; break;
      case HandoverOutcome::FailurePingPong: ++c.failures_pingpong; break;
    }
  }
  return c;
}

double Simulator::mean_total_interference_w() const {
  return accum_samples_ ? interference_accum_ / static_cast<double>(accum_samples_) : 0.0;
}

double Simulator::mean_rate_se() const {
  return accum_samples_ ? rate_accum_ / static_cast<double>(accum_samples_) : 0.0;
}

} // namespace hynoma::net
