#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "netsim/grid.hpp"
#include "netsim/mobility.hpp"
#include "phy/channel.hpp"
#include "seqlib/sequences.hpp"

namespace hynoma::net {

enum class HandoverOutcome { Success, FailureRLF, FailurePingPong };
const char* outcome_name(HandoverOutcome o);

struct HandoverRecord {
  long tick = 0;
  int user_id = 0;
  int source_cell = 0;
  int target_cell = 0;
  HandoverOutcome outcome = HandoverOutcome::Success;
  bool finalized = false;
  double margin_db = 0.0;
  long completion_tick = -1;
  bool blocked = false; // admission rejection, counted with the RLF failures
};

// Inter-cell sequence coupling model: the average over chip offsets
// (expected asynchronous interference power) or the worst-case off-zero
// peak. Intra-cell residuals always use the zero-lag (synchronous) value.
enum class InterCoupling { MeanSquareOffZero, PeakOffZero };
const char* inter_coupling_name(InterCoupling m);
InterCoupling inter_coupling_from_name(const std::string& name);

// Scenario constants; the key names follow the scenario config file schema.
struct ScenarioParams {
  int rings = 1;
  double isd_m = 500.0;
  int users_per_cell = 6;
  double velocity_kmh_min = 3.0;
  double velocity_kmh_max = 120.0;
  double tick_ms = 100.0;
  int ttt_ticks = 3;
  double ho_margin_db = 3.0;

  int t_exec_ticks = 2;
  int t_pp_ticks = 50;
  double gamma_fail_db = -8.0;
  int group_max = 8;
  int ho_cooldown_ticks = 10;
  int ho_block_cooldown_ticks = 30;  // back-off after an admission block
  int ho_block_suppress_ticks = 100; // per-target quarantine after a block
  double mobility_pad_m = 250.0;     // widens the waypoint box beyond the grid
  InterCoupling inter_coupling = InterCoupling::MeanSquareOffZero;

  phy::ChannelParams channel;
  double tx_power_dbm = 46.0;
  double noise_dbm = -104.0;
  double rsrp_filter_coeff = 0.5;
  // uniform inter-cell isolation (frequency planning / ICIC), dB <= 0
  double inter_isolation_db = -12.0;
  double qos_min_rate_se = 0.5;
  double bandwidth_mhz = 100.0;
  double margin_min_db = 0.0;
  double margin_max_db = 6.0;

  double tx_power_w() const { return phy::dbm_to_watts(tx_power_dbm); }
  double noise_w() const { return phy::dbm_to_watts(noise_dbm); }
  double tick_s() const { return tick_ms / 1000.0; }
};

// The scenario's sequence pool with both coupling tables. Entry indices are
// the `seq_id`s users carry; assigning one pool entry to two users models a
// code collision (coupling 1).
struct SequencePool {
  std::vector<seq::ChipSequence> entries;
  std::vector<double> rho2_sync;  // [i * n + j], (R(0)/N)^2, diag = 1
  std::vector<double> rho2_async; // [i * n + j], off-zero peak rule, diag = 1

  int size() const { return static_cast<int>(entries.size()); }
  double sync(int i, int j) const { return rho2_sync[i * size() + j]; }
  double async(int i, int j) const { return rho2_async[i * size() + j]; }

  static SequencePool build(std::vector<seq::ChipSequence> entries,
                            InterCoupling model = InterCoupling::MeanSquareOffZero);
};

struct UserState {
  int id = 0;
  MobilityState mobility;
  int serving_cell = 0;
  int seq_id = 0;
  double margin_db = 3.0;
  bool qos_ok = false;

  // A3 bookkeeping
  int a3_target = -1;
  int a3_count = 0;
  int cooldown = 0;
  std::vector<long> target_suppressed_until; // per cell, after admission blocks

  // in-flight handover execution
  bool executing = false;
  int exec_target = -1;
  int exec_source = -1;
  int exec_ticks_left = 0;
  bool exec_any_tick_ok = false;
  int exec_record = -1;

  // last completed handover, for ping-pong reclassification
  long last_completion_tick = -1000000;
  int last_source = -1;
  int last_record = -1;

  std::vector<phy::RsrpFilter> rsrp_filters; // one per cell
  std::vector<double> fading_power;          // instantaneous |g|^2 per cell
  Rect waypoint_bounds;                      // defaults to the padded grid box

  // per-tick results
  double rate_se = 0.0;
  double sinr_db = 0.0;
  double intra_w = 0.0;
  double inter_w = 0.0;
  double rsrp_serving_dbm = -160.0;
};

struct TickEvents {
  // records finalized or reclassified during this tick, by record index
  std::vector<int> failures;
  std::vector<int> successes;
};

// alpha presets: ratio^position splits, position 0 = first decoded (weakest
// channel, largest share). Index 0 is uniform.
std::vector<double> power_profile(int group_size, int profile_index);
int power_profile_count();

// Deterministic multi-cell downlink simulator. One instance is one replica:
// single-threaded, all randomness from the seeded rng.
class Simulator {
public:
  using Assigner = std::function<int(Simulator&, int user_id, int cell_id)>;

  Simulator(const ScenarioParams& params, SequencePool pool, Assigner assigner, Rng rng);

  // mobility -> channels -> handover machine -> rates; returns the tick's events
  TickEvents tick();

  // finalize any in-flight execution with the evidence so far (horizon end)
  void finalize_pending();

  long tick_count() const { return tick_; }
  const ScenarioParams& params() const { return params_; }
  const CellGrid& grid() const { return grid_; }
  const SequencePool& pool() const { return pool_; }
  const std::vector<UserState>& users() const { return users_; }
  const std::vector<HandoverRecord>& records() const { return records_; }
  const std::vector<int>& cell_members(int cell) const { return members_[cell]; }
  int cell_profile(int cell) const { return cell_profile_[cell]; }

  // control surface (the RL action path)
  void set_user_sequence(int user_id, int seq_id);
  void set_cell_profile(int cell_id, int profile_index);
  void adjust_margin(int user_id, double delta_db);
  // confine one user's waypoints (the mobility-stressed user stays on-grid)
  void set_user_waypoint_bounds(int user_id, const Rect& bounds);
  Rect core_bounds() const; // the unpadded grid box

  // aggregate accounting
  struct Counters {
    long attempts = 0;
    long successes = 0;
    long failures_rlf = 0;
    long failures_pingpong = 0;
  };
  Counters counters() const;

  double mean_total_interference_w() const; // running mean over users and ticks
  double mean_rate_se() const;

  // exposed for the experiment policies (attach decisions)
  double user_cell_distance(int user_id, int cell_id) const;

private:
  void place_users();
  void sample_all_channels();
  void update_handover_machine(TickEvents& events);
  void start_execution(UserState& u, int target, TickEvents& events);
  void finish_execution(UserState& u, TickEvents& events);
  void compute_rates();
  void move_user(int user_id, int from_cell, int to_cell);
  double smoothed_rsrp_dbm(const UserState& u, int cell) const;
  double inter_interference_w(const UserState& u) const;

  ScenarioParams params_;
  CellGrid grid_;
  SequencePool pool_;
  Assigner assigner_;
  Rng rng_;
  Rect bounds_;

  std::vector<UserState> users_;
  std::vector<std::vector<int>> members_; // per cell, kept in SIC decode order
  std::vector<int> cell_profile_;
  std::vector<HandoverRecord> records_;
  long tick_ = 0;

  double interference_accum_ = 0.0;
  double rate_accum_ = 0.0;
  long accum_samples_ = 0;
};

// Standalone A3 check (the tick loop uses the same rule): target RSRP above
// serving RSRP plus the user's margin.
bool a3_condition(double rsrp_target_dbm, double rsrp_serving_dbm, double margin_db);

} // namespace hynoma::net
