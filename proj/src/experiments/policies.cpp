#include "experiments/policies.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "seqlib/correlation.hpp"

namespace hynoma::experiments {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::GoldOnly: return "gold_only";
    case Policy::WalshOnly: return "walsh_only";
    case Policy::KasamiOnly: return "kasami_only";
    case Policy::HybridNoAI: return "hybrid_no_ai";
    case Policy::DrlConventional: return "drl_conventional";
    case Policy::HybridDqn: return "hybrid_dqn";
    case Policy::NoDqnPower: return "no_dqn_power";
    case Policy::NoDqnSequence: return "no_dqn_sequence";
    case Policy::NoGold: return "no_gold";
    case Policy::NoWalsh: return "no_walsh";
  }
  return "?";
}

Policy policy_from_name(const std::string& name) {
  for (Policy p : {Policy::GoldOnly, Policy::WalshOnly, Policy::KasamiOnly, Policy::HybridNoAI,
                   Policy::DrlConventional, Policy::HybridDqn, Policy::NoDqnPower,
                   Policy::NoDqnSequence, Policy::NoGold, Policy::NoWalsh})
    if (name == policy_name(p)) return p;
  throw std::invalid_argument("unknown policy: " + name);
}

bool policy_uses_dqn(Policy p) {
  switch (p) {
    case Policy::GoldOnly:
    case Policy::WalshOnly:
    case Policy::KasamiOnly:
    case Policy::HybridNoAI:
      return false;
    default:
      return true;
  }
}

bool policy_is_ablation(Policy p) {
  return p == Policy::NoDqnPower || p == Policy::NoDqnSequence || p == Policy::NoGold ||
         p == Policy::NoWalsh;
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  ExperimentConfig x;
  auto& sc = x.env.scenario;
  sc.rings = static_cast<int>(cfg.get_int("rings", sc.rings));
  sc.isd_m = cfg.get_double("isd_m", sc.isd_m);
  sc.users_per_cell = static_cast<int>(cfg.get_int("users_per_cell", sc.users_per_cell));
  sc.velocity_kmh_min = cfg.get_double("velocity_kmh_min", sc.velocity_kmh_min);
  sc.velocity_kmh_max = cfg.get_double("velocity_kmh_max", sc.velocity_kmh_max);
  sc.tick_ms = cfg.get_double("tick_ms", sc.tick_ms);
  sc.ttt_ticks = static_cast<int>(cfg.get_int("ttt_ticks", sc.ttt_ticks));
  sc.ho_margin_db = cfg.get_double("ho_margin_db", sc.ho_margin_db);
  sc.t_exec_ticks = static_cast<int>(cfg.get_int("t_exec_ticks", sc.t_exec_ticks));
  sc.t_pp_ticks = static_cast<int>(cfg.get_int("t_pp_ticks", sc.t_pp_ticks));
  sc.gamma_fail_db = cfg.get_double("gamma_fail_db", sc.gamma_fail_db);
  sc.group_max = static_cast<int>(cfg.get_int("group_max", sc.group_max));
  sc.ho_cooldown_ticks = static_cast<int>(cfg.get_int("ho_cooldown_ticks", sc.ho_cooldown_ticks));
  sc.ho_block_cooldown_ticks =
      static_cast<int>(cfg.get_int("ho_block_cooldown_ticks", sc.ho_block_cooldown_ticks));
  sc.ho_block_suppress_ticks =
      static_cast<int>(cfg.get_int("ho_block_suppress_ticks", sc.ho_block_suppress_ticks));
  sc.mobility_pad_m = cfg.get_double("mobility_pad_m", sc.mobility_pad_m);
  sc.inter_coupling = net::inter_coupling_from_name(
      cfg.get_string("inter_coupling", net::inter_coupling_name(sc.inter_coupling)));
  sc.tx_power_dbm = cfg.get_double("tx_power_dbm", sc.tx_power_dbm);
  sc.noise_dbm = cfg.get_double("noise_dbm", sc.noise_dbm);
  sc.rsrp_filter_coeff = cfg.get_double("rsrp_filter_coeff", sc.rsrp_filter_coeff);
  sc.inter_isolation_db = cfg.get_double("inter_isolation_db", sc.inter_isolation_db);
  sc.qos_min_rate_se = cfg.get_double("qos_min_rate_se", sc.qos_min_rate_se);
  sc.bandwidth_mhz = cfg.get_double("bandwidth_mhz", sc.bandwidth_mhz);
  sc.margin_max_db = cfg.get_double("margin_max_db", sc.margin_max_db);
  sc.channel.pathloss_exponent = cfg.get_double("pathloss_exponent", sc.channel.pathloss_exponent);
  sc.channel.l0_linear = cfg.get_double("ref_pathloss_linear", sc.channel.l0_linear);
  sc.channel.d0_m = cfg.get_double("ref_distance_m", sc.channel.d0_m);

  auto& w = x.env.weights;
  w.throughput = cfg.get_double("reward_weights.throughput", w.throughput);
  w.interference = cfg.get_double("reward_weights.interference", w.interference);
  w.ho_failure = cfg.get_double("reward_weights.ho_failure", w.ho_failure);
  w.qos = cfg.get_double("reward_weights.qos", w.qos);
  w.energy = cfg.get_double("reward_weights.energy", w.energy);
  x.env.episode_ticks = static_cast<int>(cfg.get_int("episode_ticks", x.env.episode_ticks));
  x.env.tagged_velocity_kmh_min =
      cfg.get_double("tagged_velocity_kmh_min", x.env.tagged_velocity_kmh_min);
  x.env.tagged_velocity_kmh_max =
      cfg.get_double("tagged_velocity_kmh_max", x.env.tagged_velocity_kmh_max);
  x.env.reward_norm_se_per_user =
      cfg.get_double("reward_norm_se_per_user", x.env.reward_norm_se_per_user);

  auto& s = x.schedule;
  s.learning_rate = cfg.get_double("dqn.learning_rate", s.learning_rate);
  s.gamma = cfg.get_double("dqn.gamma", s.gamma);
  s.epsilon_start = cfg.get_double("dqn.epsilon_start", s.epsilon_start);
  s.epsilon_end = cfg.get_double("dqn.epsilon_end", s.epsilon_end);
  s.epsilon_decay_fraction = cfg.get_double("dqn.epsilon_decay_fraction", s.epsilon_decay_fraction);
  s.target_update_period =
      cfg.get_int("dqn.target_update_period", s.target_update_period);
  s.target_update_by_episodes =
      cfg.get_bool("dqn.target_update_by_episodes", s.target_update_by_episodes);
  s.batch_size = static_cast<int>(cfg.get_int("dqn.batch_size", s.batch_size));
  s.episodes = static_cast<int>(cfg.get_int("dqn.episodes", s.episodes));
  s.warmup_transitions = static_cast<int>(cfg.get_int("dqn.warmup", s.warmup_transitions));
  s.train_every_ticks = static_cast<int>(cfg.get_int("dqn.train_every_ticks", s.train_every_ticks));
  s.replay_capacity = static_cast<int>(cfg.get_int("dqn.replay_capacity", s.replay_capacity));
  s.per_alpha = cfg.get_double("dqn.per_alpha", s.per_alpha);
  s.per_beta_start = cfg.get_double("dqn.per_beta_start", s.per_beta_start);
  s.per_beta_end = cfg.get_double("dqn.per_beta_end", s.per_beta_end);
  s.per_epsilon = cfg.get_double("dqn.per_epsilon", s.per_epsilon);
  s.huber_delta = cfg.get_double("dqn.huber_delta", s.huber_delta);
  s.dropout = cfg.get_double("dqn.dropout", s.dropout);
  s.lr_decay_tau_frac = cfg.get_double("dqn.lr_decay_tau_frac", s.lr_decay_tau_frac);
  s.hidden1 = static_cast<int>(cfg.get_int("dqn.hidden1", s.hidden1));
  s.hidden2 = static_cast<int>(cfg.get_int("dqn.hidden2", s.hidden2));

  x.eval_episodes = static_cast<int>(cfg.get_int("eval_episodes", x.eval_episodes));
  x.gold_m = static_cast<int>(cfg.get_int("gold_m", x.gold_m));
  x.walsh_order = static_cast<int>(cfg.get_int("walsh_order", x.walsh_order));
  x.kasami_m = static_cast<int>(cfg.get_int("kasami_m", x.kasami_m));
  x.action_sequences = static_cast<int>(cfg.get_int("action.sequences", x.action_sequences));
  x.action_profiles = static_cast<int>(cfg.get_int("action.power_profiles", x.action_profiles));
  x.hybrid_rows_per_cell =
      static_cast<int>(cfg.get_int("hybrid_rows_per_cell", x.hybrid_rows_per_cell));
  x.base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  x.config_hash = cfg.hash_hex();

  if (x.action_profiles < 1 || x.action_profiles > net::power_profile_count())
    throw std::invalid_argument("action.power_profiles out of range");
  if (x.action_sequences < 1) throw std::invalid_argument("action.sequences must be >= 1");
  return x;
}

namespace {

// Round-robin over a fixed family, skipping codes already used in the cell
// when the family is large enough. When it is exhausted (more users than
// codes) duplicates are unavoidable; that reuse is the collision mechanism
// small families suffer from.
rl::AssignerFactory make_round_robin_factory(int pool_size) {
  return [pool_size]() -> net::Simulator::Assigner {
    auto counter = std::make_shared<int>(0);
    return [pool_size, counter](net::Simulator& sim, int /*user*/, int cell) {
      const auto& members = sim.cell_members(cell);
      for (int attempt = 0; attempt < pool_size; ++attempt) {
        const int cand = (*counter + attempt) % pool_size;
        bool used = false;
        for (int id : members)
          if (sim.users()[id].seq_id == cand) used = true;
        if (!used) {
          *counter = (cand + 1) % pool_size;
          return cand;
        }
      }
      const int cand = *counter % pool_size;
      *counter = (*counter + 1) % pool_size;
      return cand;
    };
  };
}

// Fixed per-cell channel list: the lowest free row index in the serving
// cell's block, the way a channelization code is handed out at attach.
rl::AssignerFactory make_cell_block_factory(int rows_per_cell) {
  return [rows_per_cell]() -> net::Simulator::Assigner {
    return [rows_per_cell](net::Simulator& sim, int user, int cell) {
      const auto& members = sim.cell_members(cell);
      for (int r = 0; r < rows_per_cell; ++r) {
        const int cand = cell * rows_per_cell + r;
        bool used = false;
        for (int id : members)
          if (id != user && sim.users()[id].seq_id == cand) used = true;
        if (!used) return cand;
      }
      return cell * rows_per_cell;
    };
  };
}

// Greedy least-cross-correlation pick for the hybrid arms: among the serving
// cell's rows not in use, take the one minimizing the worst off-zero-peak
// coupling with the codes already active in the cell. Recomputed only at
// attach. Stateless, so the factory returns the same closure each episode.
rl::AssignerFactory make_hybrid_greedy_factory(int rows_per_cell) {
  return [rows_per_cell]() -> net::Simulator::Assigner {
    return [rows_per_cell](net::Simulator& sim, int user, int cell) {
      const auto& members = sim.cell_members(cell);
      const auto& pool = sim.pool();
      int best = cell * rows_per_cell;
      double best_worst = 1e300;
      for (int r = 0; r < rows_per_cell; ++r) {
        const int cand = cell * rows_per_cell + r;
        bool used = false;
        for (int id : members)
          if (id != user && sim.users()[id].seq_id == cand) used = true;
        if (used) continue;
        double worst = 0.0;
        for (int id : members)
          if (id != user) worst = std::max(worst, pool.async(cand, sim.users()[id].seq_id));
        if (worst < best_worst) {
          best_worst = worst;
          best = cand;
        }
      }
      return best;
    };
  };
}

net::SequencePool build_family_pool(const std::vector<seq::ChipSequence>& family,
                                    net::InterCoupling model) {
  return net::SequencePool::build(family, model);
}

// Per-cell scrambler with code-planned Walsh rows underneath. Cells pick
// their rows greedily so that the realized coupling against the codes
// already planned in other cells stays small; the large combined family is
// what gives the planner room (no fixed family offers this freedom).
net::SequencePool build_hybrid_pool(const ExperimentConfig& cfg, int cells) {
  const auto golds = seq::generate_gold_family(cfg.gold_m);
  const auto walshes = seq::generate_walsh_family(cfg.walsh_order);
  const int rows = cfg.hybrid_rows_per_cell;
  const auto model = cfg.env.scenario.inter_coupling;

  auto coupling = [model](const seq::ChipSequence& a, const seq::ChipSequence& b) {
    return model == net::InterCoupling::MeanSquareOffZero ? seq::coupling_async_meansq(a, b)
                                                          : seq::coupling_async_peak(a, b);
  };

  // all candidate hybrids per cell
  std::vector<std::vector<seq::ChipSequence>> candidates(cells);
  for (int c = 0; c < cells; ++c) {
    const auto& g = golds[c % golds.size()];
    for (const auto& w : walshes) candidates[c].push_back(seq::make_hybrid(g, w));
  }

  std::vector<seq::ChipSequence> planned;
  std::vector<seq::ChipSequence> entries;
  for (int c = 0; c < cells; ++c) {
    // score each candidate row by its worst coupling against the plan so far
    std::vector<std::pair<double, int>> scored;
    for (std::size_t r = 0; r < candidates[c].size(); ++r) {
      double worst = 0.0;
      for (const auto& p : planned)
        worst = std::max(worst, coupling(candidates[c][r], p));
      scored.push_back({worst, static_cast<int>(r)});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int k = 0; k < rows; ++k) {
      auto h = candidates[c][scored[k].second];
      h.index = c * rows + k;
      planned.push_back(h);
      entries.push_back(std::move(h));
    }
  }
  return net::SequencePool::build(std::move(entries), model);
}

// Walsh channelization without a scrambler: row indices are per-cell
// resources, so every cell transmits the same chip patterns and cross-cell
// collisions are structural. This is the configuration cell-specific
// scrambling exists to fix.
net::SequencePool build_bare_walsh_cell_pool(const ExperimentConfig& cfg, int cells) {
  const auto walshes = seq::generate_walsh_family(cfg.walsh_order);
  std::vector<seq::ChipSequence> entries;
  for (int c = 0; c < cells; ++c) {
    for (int r = 0; r < cfg.hybrid_rows_per_cell; ++r) {
      auto w = walshes[r % walshes.size()];
      w.index = c * cfg.hybrid_rows_per_cell + r;
      entries.push_back(std::move(w));
    }
  }
  return net::SequencePool::build(std::move(entries), cfg.env.scenario.inter_coupling);
}

int grid_cells(const ExperimentConfig& cfg) {
  return cfg.env.scenario.rings == 1 ? 7 : 19;
}

} // namespace

PolicySetup make_policy_setup(Policy policy, const ExperimentConfig& cfg) {
  PolicySetup setup;
  const int cells = grid_cells(cfg);
  const int rows = cfg.hybrid_rows_per_cell;

  setup.control.baseline_profile = 2;
  setup.control.sequence_choices = 1;
  setup.control.profile_choices = 1;
  setup.control.margin_control = false;

  auto enable_dqn_controls = [&](bool seq_control, bool power_control) {
    setup.control.sequence_choices = seq_control ? cfg.action_sequences : 1;
    setup.control.profile_choices = power_control ? cfg.action_profiles : 1;
    setup.control.margin_control = true;
  };

  switch (policy) {
    case Policy::GoldOnly: {
      setup.pool = build_family_pool(seq::generate_gold_family(cfg.gold_m),
                                     cfg.env.scenario.inter_coupling);
      setup.assigner_factory = make_round_robin_factory(setup.pool.size());
      break;
    }
    case Policy::WalshOnly: {
      // channel indices are per-cell resources without a scrambler, so the
      // same chip patterns repeat in every cell
      setup.pool = build_bare_walsh_cell_pool(cfg, cells);
      setup.assigner_factory = make_cell_block_factory(rows);
      break;
    }
    case Policy::KasamiOnly: {
      setup.pool = build_family_pool(seq::generate_kasami_small(cfg.kasami_m),
                                     cfg.env.scenario.inter_coupling);
      setup.assigner_factory = make_round_robin_factory(setup.pool.size());
      break;
    }
    case Policy::HybridNoAI: {
      setup.pool = build_hybrid_pool(cfg, cells);
      setup.assigner_factory = make_hybrid_greedy_factory(rows);
      break;
    }
    case Policy::HybridDqn:
    case Policy::NoDqnPower:
    case Policy::NoDqnSequence: {
      setup.pool = build_hybrid_pool(cfg, cells);
      setup.assigner_factory = make_hybrid_greedy_factory(rows);
      enable_dqn_controls(policy != Policy::NoDqnSequence, policy != Policy::NoDqnPower);
      if (policy == Policy::NoDqnPower) setup.control.baseline_profile = 0; // uniform only
      if (policy != Policy::NoDqnSequence) {
        const int S = cfg.action_sequences;
        setup.control.sequence_for_choice = [rows, S](int, int cell, int choice) {
          return cell * rows + choice % std::min(rows, S);
        };
      }
      break;
    }
    case Policy::DrlConventional:
    case Policy::NoWalsh: {
      // the same agent, Gold codes only in the action space
      setup.pool = build_family_pool(seq::generate_gold_family(cfg.gold_m),
                                     cfg.env.scenario.inter_coupling);
      setup.assigner_factory = make_round_robin_factory(setup.pool.size());
      enable_dqn_controls(true, true);
      const int S = cfg.action_sequences;
      const int n = setup.pool.size();
      setup.control.sequence_for_choice = [S, n](int, int cell, int choice) {
        return (cell * S + choice) % n;
      };
      break;
    }
    case Policy::NoGold: {
      setup.pool = build_bare_walsh_cell_pool(cfg, cells);
      setup.assigner_factory = make_hybrid_greedy_factory(rows);
      enable_dqn_controls(true, true);
      const int S = cfg.action_sequences;
      setup.control.sequence_for_choice = [rows, S](int, int cell, int choice) {
        return cell * rows + choice % std::min(rows, S);
      };
      break;
    }
  }
  return setup;
}

rl::Environment make_environment(Policy policy, const ExperimentConfig& cfg) {
  PolicySetup setup = make_policy_setup(policy, cfg);
  return rl::Environment(cfg.env, std::move(setup.pool), std::move(setup.assigner_factory),
                         std::move(setup.control));
}

} // namespace hynoma::experiments
