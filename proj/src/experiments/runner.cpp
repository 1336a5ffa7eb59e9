#include "experiments/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "stats/stats.hpp"

namespace hynoma::experiments {

using ordered_json = nlohmann::ordered_json;

static std::string model_tag(const ExperimentConfig& cfg) {
  return std::string("intra:sync-zero-lag inter:async-") +
         net::inter_coupling_name(cfg.env.scenario.inter_coupling);
}

long RunMetrics::total_attempts() const {
  long a = 0;
  for (std::size_t i = 0; i < ho_success.size(); ++i)
    a += ho_success[i] + ho_rlf[i] + ho_pingpong[i];
  return a;
}

long RunMetrics::total_successes() const {
  long s = 0;
  for (long v : ho_success) s += v;
  return s;
}

double RunMetrics::aggregate_hsr() const {
  const long attempts = total_attempts();
  if (attempts == 0) return std::nan("");
  return 100.0 * static_cast<double>(total_successes()) / static_cast<double>(attempts);
}

double RunMetrics::mean_throughput_mbps() const {
  return throughput_mbps.empty() ? 0.0 : stats::mean(throughput_mbps);
}

double RunMetrics::mean_interference_dbm() const {
  if (interference_dbm.empty()) return -200.0;
  double acc = 0.0;
  for (double dbm : interference_dbm) acc += phy::dbm_to_watts(dbm);
  return phy::watts_to_dbm(acc / static_cast<double>(interference_dbm.size()));
}

double RunMetrics::mean_reward() const { return reward.empty() ? 0.0 : stats::mean(reward); }

static std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string run_metrics_to_csv(const RunMetrics& m) {
  std::string out;
  out += "# hynoma run metrics\n";
  out += std::string("# policy = ") + policy_name(m.policy) + "\n";
  out += "# seed = " + std::to_string(m.seed) + "\n";
  out += "# config_hash = " + m.config_hash + "\n";
  out += "# model = " + m.model_tag + "\n";
  out += "episode,hsr,throughput_mbps,interference_dbm,reward,ho_success,ho_rlf,ho_pingpong\n";
  for (std::size_t e = 0; e < m.reward.size(); ++e) {
    out += std::to_string(e + 1) + ",";
    out += std::isnan(m.hsr[e]) ? "n/a" : fmt(m.hsr[e]);
    out += "," + fmt(m.throughput_mbps[e]);
    out += "," + fmt(m.interference_dbm[e]);
    out += "," + fmt(m.reward[e]);
    out += "," + std::to_string(m.ho_success[e]);
    out += "," + std::to_string(m.ho_rlf[e]);
    out += "," + std::to_string(m.ho_pingpong[e]);
    out += "\n";
  }
  return out;
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t base_seed, int count) {
  std::vector<std::uint64_t> seeds(count);
  std::uint64_t state = base_seed ^ 0xa5a5a5a55a5a5a5aull;
  for (int i = 0; i < count; ++i) seeds[i] = splitmix64(state);
  return seeds;
}

static std::uint64_t episode_seed(std::uint64_t run_seed, int episode) {
  std::uint64_t state = run_seed + 0x1000 + static_cast<std::uint64_t>(episode);
  return splitmix64(state);
}

// One evaluation run: fresh environment, eval_episodes episodes, greedy agent
// for DQN arms and the static no-op action otherwise. The policy setup is
// shared across seeds; planning the pool is the expensive part.
static RunMetrics evaluate_one_seed(Policy policy, const PolicySetup& setup,
                                    const ExperimentConfig& cfg, std::uint64_t seed,
                                    const dqn::QNetwork* checkpoint) {
  rl::Environment env(cfg.env, setup.pool, setup.assigner_factory, setup.control);
  const bool uses_net = policy_uses_dqn(policy);
  const double bw_hz = cfg.env.scenario.bandwidth_mhz * 1e6;

  RunMetrics m;
  m.policy = policy;
  m.seed = seed;
  m.config_hash = cfg.config_hash;
  m.model_tag = model_tag(cfg);

  Rng greedy_rng(seed ^ 0xe7a1ull); // only consulted if epsilon were nonzero
  for (int ep = 0; ep < cfg.eval_episodes; ++ep) {
    auto state_arr = env.reset(episode_seed(seed, ep));
    std::vector<double> state(state_arr.begin(), state_arr.end());

    double reward_sum = 0.0;
    double interference_w_acc = 0.0;
    double throughput_acc = 0.0;
    long ticks = 0;

    while (!env.done()) {
      int action_id = 1; // (seq 0, profile 0, margin hold) for static arms
      if (uses_net)
        action_id = dqn::select_action(*checkpoint, state, 0.0, greedy_rng);
      const auto step = env.step(action_id);
      reward_sum += step.reward.total;
      state.assign(step.state.begin(), step.state.end());

      const auto& u = env.sim().users()[env.tagged_user()];
      // interference is a system-level metric: average over every user
      double net_interference = 0.0;
      for (const auto& other : env.sim().users()) net_interference += other.intra_w + other.inter_w;
      interference_w_acc += net_interference / static_cast<double>(env.sim().users().size());
      const auto group_n = env.sim().cell_members(u.serving_cell).size();
      throughput_acc += u.rate_se * bw_hz / static_cast<double>(std::max<std::size_t>(group_n, 1));
      ++ticks;
    }

    // tagged-user handover ledger for this episode
    long succ = 0, rlf = 0, pp = 0;
    for (const auto& rec : env.sim().records()) {
      if (rec.user_id != env.tagged_user() || !rec.finalized) continue;
      switch (rec.outcome) {
        case net::HandoverOutcome::Success: ++succ; break;
        case net::HandoverOutcome::FailureRLF: ++rlf; break;
        case net::HandoverOutcome::FailurePingPong: ++pp; break;
      }
    }
    const long attempts = succ + rlf + pp;
    m.hsr.push_back(attempts > 0 ? 100.0 * static_cast<double>(succ) / attempts : std::nan(""));
    m.throughput_mbps.push_back(throughput_acc / static_cast<double>(ticks) / 1e6);
    const double mean_w = interference_w_acc / static_cast<double>(ticks);
    m.interference_dbm.push_back(mean_w > 0.0 ? phy::watts_to_dbm(mean_w) : -200.0);
    m.reward.push_back(reward_sum);
    m.ho_success.push_back(succ);
    m.ho_rlf.push_back(rlf);
    m.ho_pingpong.push_back(pp);
  }
  return m;
}

std::vector<RunMetrics> run_scenario(Policy policy, const ExperimentConfig& cfg,
                                     std::span<const std::uint64_t> seeds,
                                     const dqn::QNetwork* checkpoint) {
  if (seeds.empty()) throw std::invalid_argument("run_scenario needs at least one seed");
  if (policy_uses_dqn(policy) && checkpoint == nullptr)
    throw std::invalid_argument("policy requires a trained checkpoint");

  const PolicySetup setup = make_policy_setup(policy, cfg);

  std::vector<RunMetrics> out(seeds.size());
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || seeds.size() == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      out[i] = evaluate_one_seed(policy, setup, cfg, seeds[i], checkpoint);
    return out;
  }

  // seed fan-out; each worker owns its environment, slots keep seed order
  std::vector<std::thread> workers;
  std::atomic<std::size_t> next{0};
  for (int j = 0; j < jobs; ++j) {
    workers.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= seeds.size()) break;
        out[i] = evaluate_one_seed(policy, setup, cfg, seeds[i], checkpoint);
      }
    });
  }
  for (auto& w : workers) w.join();
  return out;
}

TrainOutput train_policy(Policy policy, const ExperimentConfig& cfg, std::uint64_t train_seed) {
  if (!policy_uses_dqn(policy))
    throw std::invalid_argument("policy has no trainable agent: " +
                                std::string(policy_name(policy)));
  rl::Environment env = make_environment(policy, cfg);
  dqn::Trainer trainer(env, cfg.schedule, train_seed);
  auto result = trainer.run();
  TrainOutput out;
  out.network = std::move(result.network);
  out.episodes = std::move(result.episodes);
  out.episode_rewards = std::move(result.episode_rewards);
  return out;
}

std::string train_history_to_csv(const TrainOutput& t, Policy policy,
                                 const std::string& config_hash, std::uint64_t seed) {
  std::string out;
  out += "# hynoma training history\n";
  out += std::string("# policy = ") + policy_name(policy) + "\n";
  out += "# seed = " + std::to_string(seed) + "\n";
  out += "# config_hash = " + config_hash + "\n";
  out += "episode,reward,mean_loss,epsilon,ho_success,ho_rlf,ho_pingpong\n";
  for (const auto& ep : t.episodes) {
    out += std::to_string(ep.episode + 1) + "," + fmt(ep.reward_sum) + "," + fmt(ep.mean_loss) +
           "," + fmt(ep.epsilon) + "," + std::to_string(ep.counters.successes) + "," +
           std::to_string(ep.counters.failures_rlf) + "," +
           std::to_string(ep.counters.failures_pingpong) + "\n";
  }
  return out;
}

ArmSummary summarize_arm(Policy policy, const std::vector<RunMetrics>& runs) {
  ArmSummary s;
  s.policy = policy;
  for (const auto& run : runs) {
    const double hsr = run.aggregate_hsr();
    if (!std::isnan(hsr)) s.seed_hsr.push_back(hsr);
    s.seed_throughput.push_back(run.mean_throughput_mbps());
    s.seed_interference_dbm.push_back(run.mean_interference_dbm());
  }
  if (!s.seed_hsr.empty()) {
    s.hsr_mean = stats::mean(s.seed_hsr);
    if (s.seed_hsr.size() >= 2) {
      const auto ci = stats::confidence_interval(s.seed_hsr, 0.95);
      s.hsr_ci_lo = ci.lo;
      s.hsr_ci_hi = ci.hi;
    } else {
      s.hsr_ci_lo = s.hsr_ci_hi = s.hsr_mean;
    }
  } else {
    s.hsr_mean = std::nan("");
  }
  if (!s.seed_throughput.empty()) s.throughput_mean = stats::mean(s.seed_throughput);
  if (!s.seed_interference_dbm.empty()) {
    double acc = 0.0;
    for (double dbm : s.seed_interference_dbm) acc += phy::dbm_to_watts(dbm);
    s.interference_dbm_mean =
        phy::watts_to_dbm(acc / static_cast<double>(s.seed_interference_dbm.size()));
  }
  return s;
}

static const Policy kCompareArms[] = {Policy::GoldOnly,   Policy::WalshOnly,
                                      Policy::KasamiOnly, Policy::HybridNoAI,
                                      Policy::DrlConventional, Policy::HybridDqn};

// Degenerate smoke-scale runs can leave a group with fewer than two usable
// seeds; the suite then reports NaN instead of aborting.
static stats::AnovaResult anova_or_degenerate(const std::vector<std::vector<double>>& groups) {
  for (const auto& g : groups)
    if (g.size() < 2) {
      stats::AnovaResult r;
      r.f = std::nan("");
      r.p_value = std::nan("");
      return r;
    }
  return stats::one_way_anova(groups);
}

CompareSummary suite_compare(const ExperimentConfig& cfg, int seed_count,
                             const std::string& out_dir) {
  if (seed_count < 1) throw std::invalid_argument("suite needs at least one seed");
  const auto seeds = evaluation_seeds(cfg.base_seed, seed_count);

  // the two trainable arms share the training seed for a like-for-like start
  const std::uint64_t train_seed = cfg.base_seed ^ 0x7472ull;
  TrainOutput hybrid_net = train_policy(Policy::HybridDqn, cfg, train_seed);
  TrainOutput conv_net = train_policy(Policy::DrlConventional, cfg, train_seed);

  if (!out_dir.empty()) {
    write_file(out_dir + "/train_hybrid_dqn.csv",
               train_history_to_csv(hybrid_net, Policy::HybridDqn, cfg.config_hash, train_seed));
    write_file(out_dir + "/train_drl_conventional.csv",
               train_history_to_csv(conv_net, Policy::DrlConventional, cfg.config_hash, train_seed));
    write_file(out_dir + "/hybrid_dqn.qnet", hybrid_net.network.save_text());
    write_file(out_dir + "/drl_conventional.qnet", conv_net.network.save_text());
  }

  CompareSummary summary;
  summary.config_hash = cfg.config_hash;
  summary.model = model_tag(cfg);
  summary.seeds = seed_count;

  std::vector<std::vector<double>> hsr_groups, intf_groups, thr_groups;
  for (Policy p : kCompareArms) {
    const dqn::QNetwork* net = nullptr;
    if (p == Policy::HybridDqn) net = &hybrid_net.network;
    if (p == Policy::DrlConventional) net = &conv_net.network;
    auto runs = run_scenario(p, cfg, seeds, net);
    if (!out_dir.empty()) {
      std::string arm_csv;
      for (const auto& r : runs) arm_csv += run_metrics_to_csv(r);
      write_file(out_dir + "/" + policy_name(p) + ".csv", arm_csv);
    }
    auto arm = summarize_arm(p, runs);
    hsr_groups.push_back(arm.seed_hsr);
    intf_groups.push_back(arm.seed_interference_dbm);
    thr_groups.push_back(arm.seed_throughput);
    summary.arms.push_back(std::move(arm));
  }

  summary.anova_hsr = anova_or_degenerate(hsr_groups);
  summary.anova_interference = anova_or_degenerate(intf_groups);
  summary.anova_throughput = anova_or_degenerate(thr_groups);

  const auto& dqn_arm = summary.arms.back(); // HybridDqn is last
  for (std::size_t i = 0; i + 1 < summary.arms.size(); ++i) {
    CompareSummary::PairEffect e;
    e.against = summary.arms[i].policy;
    if (dqn_arm.seed_hsr.size() >= 2 && summary.arms[i].seed_hsr.size() >= 2) {
      e.cohens_d_hsr = stats::cohens_d(dqn_arm.seed_hsr, summary.arms[i].seed_hsr);
      const auto w = stats::welch_t(dqn_arm.seed_hsr, summary.arms[i].seed_hsr);
      e.welch_t = w.t;
      e.welch_p = w.p_two_sided;
    } else {
      e.cohens_d_hsr = e.welch_t = e.welch_p = std::nan("");
    }
    summary.effects.push_back(e);
  }

  if (!out_dir.empty())
    write_file(out_dir + "/summary.json", compare_summary_to_json(summary));
  return summary;
}

AblationSummary suite_ablation(const ExperimentConfig& cfg, int seed_count,
                               const std::string& out_dir) {
  if (seed_count < 1) throw std::invalid_argument("suite needs at least one seed");
  const auto seeds = evaluation_seeds(cfg.base_seed, seed_count);
  const std::uint64_t train_seed = cfg.base_seed ^ 0x7472ull;

  AblationSummary summary;
  summary.config_hash = cfg.config_hash;
  summary.model = model_tag(cfg);
  summary.seeds = seed_count;

  // full system first, then one component removed at a time
  const Policy variants[] = {Policy::HybridDqn, Policy::NoDqnPower, Policy::NoDqnSequence,
                             Policy::NoGold, Policy::NoWalsh};
  for (Policy p : variants) {
    TrainOutput trained = train_policy(p, cfg, train_seed);
    auto runs = run_scenario(p, cfg, seeds, &trained.network);
    if (!out_dir.empty()) {
      std::string arm_csv;
      for (const auto& r : runs) arm_csv += run_metrics_to_csv(r);
      write_file(out_dir + "/ablation_" + policy_name(p) + ".csv", arm_csv);
    }
    const auto arm = summarize_arm(p, runs);
    AblationRow row;
    row.policy = p;
    row.hsr_mean = arm.hsr_mean;
    row.throughput_mean = arm.throughput_mean;
    row.interference_dbm_mean = arm.interference_dbm_mean;
    summary.rows.push_back(row);
  }
  if (!out_dir.empty())
    write_file(out_dir + "/ablation_summary.json", ablation_summary_to_json(summary));
  return summary;
}

std::vector<VelocityPoint> velocity_sweep(Policy policy, std::span<const double> speeds_kmh,
                                          const ExperimentConfig& cfg, int seed_count,
                                          const std::string& out_dir,
                                          const dqn::QNetwork* checkpoint) {
  if (speeds_kmh.empty()) throw std::invalid_argument("velocity sweep needs at least one speed");
  const auto seeds = evaluation_seeds(cfg.base_seed, seed_count);

  std::vector<VelocityPoint> points;
  for (double v : speeds_kmh) {
    ExperimentConfig point_cfg = cfg;
    point_cfg.env.scenario.velocity_kmh_min = v;
    point_cfg.env.scenario.velocity_kmh_max = v;
    point_cfg.env.tagged_velocity_kmh_min = v;
    point_cfg.env.tagged_velocity_kmh_max = v;
    auto runs = run_scenario(policy, point_cfg, seeds, checkpoint);

    VelocityPoint pt;
    pt.speed_kmh = v;
    pt.summary = summarize_arm(policy, runs);
    long attempts = 0;
    long episodes = 0;
    for (const auto& r : runs) {
      attempts += r.total_attempts();
      episodes += static_cast<long>(r.reward.size());
    }
    pt.mean_attempts_per_episode =
        episodes > 0 ? static_cast<double>(attempts) / static_cast<double>(episodes) : 0.0;
    points.push_back(std::move(pt));
  }
  if (!out_dir.empty())
    write_file(out_dir + "/velocity_" + policy_name(policy) + ".json",
               velocity_sweep_to_json(points, policy, cfg.config_hash, model_tag(cfg)));
  return points;
}

static ordered_json arm_to_json(const ArmSummary& a) {
  ordered_json j;
  j["hsr_mean"] = a.hsr_mean;
  j["hsr_ci95"] = {a.hsr_ci_lo, a.hsr_ci_hi};
  j["throughput_mbps_mean"] = a.throughput_mean;
  j["interference_dbm_mean"] = a.interference_dbm_mean;
  j["seed_hsr"] = a.seed_hsr;
  return j;
}

static ordered_json anova_to_json(const stats::AnovaResult& a) {
  ordered_json j;
  j["f"] = a.f;
  j["df_between"] = a.df_between;
  j["df_within"] = a.df_within;
  j["p_value"] = a.p_value;
  return j;
}

std::string compare_summary_to_json(const CompareSummary& s) {
  ordered_json j;
  j["suite"] = "compare";
  j["config_hash"] = s.config_hash;
  j["model"] = s.model;
  j["seeds"] = s.seeds;
  ordered_json arms;
  for (const auto& a : s.arms) arms[policy_name(a.policy)] = arm_to_json(a);
  j["arms"] = arms;
  j["anova_hsr"] = anova_to_json(s.anova_hsr);
  j["anova_interference"] = anova_to_json(s.anova_interference);
  j["anova_throughput"] = anova_to_json(s.anova_throughput);
  ordered_json effects;
  for (const auto& e : s.effects) {
    ordered_json row;
    row["cohens_d_hsr"] = e.cohens_d_hsr;
    row["welch_t"] = e.welch_t;
    row["welch_p"] = e.welch_p;
    effects[policy_name(e.against)] = row;
  }
  j["hybrid_dqn_vs"] = effects;
  return j.dump(2) + "\n";
}

std::string ablation_summary_to_json(const AblationSummary& s) {
  ordered_json j;
  j["suite"] = "ablation";
  j["config_hash"] = s.config_hash;
  j["model"] = s.model;
  j["seeds"] = s.seeds;
  ordered_json rows = ordered_json::array();
  for (const auto& r : s.rows) {
    ordered_json row;
    row["variant"] = policy_name(r.policy);
    row["hsr_mean"] = r.hsr_mean;
    row["throughput_mbps_mean"] = r.throughput_mean;
    row["interference_dbm_mean"] = r.interference_dbm_mean;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string velocity_sweep_to_json(std::span<const VelocityPoint> points, Policy policy,
                                   const std::string& config_hash, const std::string& model) {
  ordered_json j;
  j["suite"] = "velocity";
  j["policy"] = policy_name(policy);
  j["config_hash"] = config_hash;
  j["model"] = model;
  ordered_json rows = ordered_json::array();
  for (const auto& p : points) {
    ordered_json row;
    row["speed_kmh"] = p.speed_kmh;
    row["hsr_mean"] = p.summary.hsr_mean;
    row["throughput_mbps_mean"] = p.summary.throughput_mean;
    row["interference_dbm_mean"] = p.summary.interference_dbm_mean;
    row["attempts_per_episode"] = p.mean_attempts_per_episode;
    rows.push_back(row);
  }
  j["points"] = rows;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

} // namespace hynoma::experiments
