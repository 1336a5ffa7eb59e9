#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "experiments/policies.hpp"
#include "stats/stats.hpp"

namespace hynoma::experiments {

// Per-run metric stream: one entry per evaluation episode, scoped to the
// controlled (tagged) user and its serving group. hsr is NaN when the episode
// had no handover attempts (rendered as "n/a").
struct RunMetrics {
  Policy policy = Policy::GoldOnly;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::vector<double> hsr;
  std::vector<double> throughput_mbps;
  std::vector<double> interference_dbm;
  std::vector<double> reward;
  std::vector<long> ho_success;
  std::vector<long> ho_rlf;
  std::vector<long> ho_pingpong;
  std::string model_tag;

  long total_attempts() const;
  long total_successes() const;
  // aggregate over the whole stream: 100 * successes / attempts, NaN if none
  double aggregate_hsr() const;
  double mean_throughput_mbps() const;
  // linear-domain average converted to dBm
  double mean_interference_dbm() const;
  double mean_reward() const;
};

// CSV with provenance header comments; byte-stable across identical runs.
std::string run_metrics_to_csv(const RunMetrics& m);

// Evaluates one policy arm over the given seeds. DQN-backed policies need the
// trained checkpoint and run greedily; baseline arms never touch a network.
std::vector<RunMetrics> run_scenario(Policy policy, const ExperimentConfig& cfg,
                                     std::span<const std::uint64_t> seeds,
                                     const dqn::QNetwork* checkpoint = nullptr);

struct TrainOutput {
  dqn::QNetwork network;
  std::vector<dqn::EpisodeStats> episodes;
  std::vector<double> episode_rewards;
};

// Trains the agent for a DQN-backed policy arm (HybridDqn, DrlConventional,
// or an ablation variant).
TrainOutput train_policy(Policy policy, const ExperimentConfig& cfg, std::uint64_t train_seed);

std::string train_history_to_csv(const TrainOutput& t, Policy policy,
                                 const std::string& config_hash, std::uint64_t seed);

// Derived evaluation seeds shared across arms (paired comparison).
std::vector<std::uint64_t> evaluation_seeds(std::uint64_t base_seed, int count);

struct ArmSummary {
  Policy policy = Policy::GoldOnly;
  std::vector<double> seed_hsr;            // per-seed aggregates, NaN-free
  std::vector<double> seed_throughput;
  std::vector<double> seed_interference_dbm;
  double hsr_mean = 0.0;
  double throughput_mean = 0.0;
  double interference_dbm_mean = 0.0;
  double hsr_ci_lo = 0.0, hsr_ci_hi = 0.0;
};

ArmSummary summarize_arm(Policy policy, const std::vector<RunMetrics>& runs);

struct CompareSummary {
  std::vector<ArmSummary> arms; // six comparison arms
  stats::AnovaResult anova_hsr;
  stats::AnovaResult anova_interference;
  stats::AnovaResult anova_throughput;
  // pairwise vs HybridDqn: (policy, cohens d on hsr, welch t, welch p)
  struct PairEffect {
    Policy against;
    double cohens_d_hsr = 0.0;
    double welch_t = 0.0;
    double welch_p = 0.0;
  };
  std::vector<PairEffect> effects;
  std::string config_hash;
  std::string model;
  int seeds = 0;
};

// Full six-way comparison: trains the two DQN arms, evaluates all arms on the
// shared seeds, writes one CSV per (arm, seed) plus summary.json in out_dir
// (empty out_dir skips the file output).
CompareSummary suite_compare(const ExperimentConfig& cfg, int seed_count,
                             const std::string& out_dir);

struct AblationRow {
  Policy policy;
  double hsr_mean = 0.0;
  double throughput_mean = 0.0;
  double interference_dbm_mean = 0.0;
};

struct AblationSummary {
  std::vector<AblationRow> rows; // full system first, then the four variants
  std::string config_hash;
  std::string model;
  int seeds = 0;
};

AblationSummary suite_ablation(const ExperimentConfig& cfg, int seed_count,
                               const std::string& out_dir);

struct VelocityPoint {
  double speed_kmh = 0.0;
  ArmSummary summary;
  double mean_attempts_per_episode = 0.0;
};

std::vector<VelocityPoint> velocity_sweep(Policy policy, std::span<const double> speeds_kmh,
                                          const ExperimentConfig& cfg, int seed_count,
                                          const std::string& out_dir,
                                          const dqn::QNetwork* checkpoint = nullptr);

std::string compare_summary_to_json(const CompareSummary& s);
std::string ablation_summary_to_json(const AblationSummary& s);
std::string velocity_sweep_to_json(std::span<const VelocityPoint> points, Policy policy,
                                   const std::string& config_hash, const std::string& model);

void write_file(const std::string& path, const std::string& content);

} // namespace hynoma::experiments
