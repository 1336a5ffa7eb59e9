// hynoma: hybrid spreading-sequence NOMA simulator with a DQN controller.
// Subcommands cover codebook generation and analysis, agent training,
// policy evaluation, the comparison/ablation/velocity suites and offline
// statistics over result CSVs.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "common/config.hpp"
#include "dqn/convergence.hpp"
#include "experiments/runner.hpp"
#include "seqlib/reports.hpp"
#include "stats/stats.hpp"

#include <json.hpp>

using namespace hynoma;
using experiments::ExperimentConfig;
using experiments::Policy;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  long long seed = 1;
  bool seed_set = false;
  int jobs = 1;
};

Config load_effective_config(const GlobalOpts& g) {
  Config cfg;
  if (!g.config_path.empty()) cfg = Config::from_file(g.config_path);
  if (g.seed_set || !cfg.has("seed")) cfg.set("seed", std::to_string(g.seed));
  return cfg;
}

ExperimentConfig experiment_config(const GlobalOpts& g) {
  Config cfg = load_effective_config(g);
  auto x = ExperimentConfig::from_config(cfg);
  x.jobs = g.jobs;
  return x;
}

// data files stay timestamp-free; the sidecar carries the wall-clock stamp
void write_sidecar(const std::string& out_dir, const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  experiments::write_file(out_dir + "/run.meta",
                          "command = " + command + "\ntimestamp = " + std::string(buf) + "\n");
}

std::vector<seq::ChipSequence> generate_family(const std::string& family, int m, int order,
                                               int count) {
  if (family == "mseq") {
    const auto* pp = seq::preferred_pair(m);
    if (!pp) throw std::invalid_argument("mseq export supports m in {5, 6, 7}");
    return {seq::generate_msequence({m, pp->taps_a, 1})};
  }
  if (family == "gold") return seq::generate_gold_family(m);
  if (family == "walsh") return seq::generate_walsh_family(order);
  if (family == "kasami") return seq::generate_kasami_small(m);
  if (family == "hybrid") {
    const auto golds = seq::generate_gold_family(m);
    const auto walshes = seq::generate_walsh_family(order);
    std::vector<seq::ChipSequence> out;
    const int n = count > 0 ? count : order;
    for (int k = 0; k < n; ++k) {
      auto h = seq::make_hybrid(golds[k % golds.size()], walshes[k % walshes.size()]);
      h.index = k;
      out.push_back(std::move(h));
    }
    return out;
  }
  throw std::invalid_argument("unknown family: " + family);
}

std::string analyze_family(const std::vector<seq::ChipSequence>& fam, const std::string& name) {
  std::string out = "sequence analysis: " + name + " (" + std::to_string(fam.size()) +
                    " sequences, length " + std::to_string(fam[0].length()) + ")\n";
  // off-zero peak distribution over all pairs
  int peak_min = 1 << 30, peak_max = 0;
  double peak_sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i + 1; j < fam.size(); ++j) {
      const auto p = seq::periodic_correlation(fam[i], fam[j]);
      peak_min = std::min(peak_min, p.peak_offzero);
      peak_max = std::max(peak_max, p.peak_offzero);
      peak_sum += p.peak_offzero;
      ++pairs;
    }
  char line[160];
  if (pairs > 0) {
    std::snprintf(line, sizeof(line),
                  "pairwise off-zero peak |R|: min=%d mean=%.2f max=%d over %ld pairs\n",
                  peak_min, peak_sum / static_cast<double>(pairs), peak_max, pairs);
    out += line;
  }
  out += "papr (linear, oversample 4):\n";
  for (const auto& s : fam) {
    std::snprintf(line, sizeof(line), "  index %-4d papr %.4f\n", s.index,
                  seq::measure_papr(s));
    out += line;
  }
  return out;
}

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

// reads one metric column from a run CSV produced by this tool ("n/a" rows skipped)
std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  std::vector<double> out;
  int col = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string tok;
    if (col < 0) {
      int idx = 0;
      while (std::getline(ss, tok, ',')) {
        if (tok == column) col = idx;
        ++idx;
      }
      if (col < 0) throw std::runtime_error("column '" + column + "' not in " + path);
      continue;
    }
    // new header blocks (multi-seed concatenation) start with "episode"
    if (line.rfind("episode,", 0) == 0) continue;
    int idx = 0;
    while (std::getline(ss, tok, ',')) {
      if (idx == col) {
        if (tok != "n/a" && !tok.empty()) out.push_back(std::stod(tok));
        break;
      }
      ++idx;
    }
  }
  return out;
}

std::string render_stats_table(const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& groups) {
  const auto anova = stats::one_way_anova(groups);
  std::string out;
  char line[200];
  out += "group              n        mean          sd       ci95_lo       ci95_hi\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto ci = stats::confidence_interval(groups[i], 0.95);
    std::snprintf(line, sizeof(line), "%-16s %4zu %11.4f %11.4f %13.4f %13.4f\n",
                  names[i].c_str(), groups[i].size(), stats::mean(groups[i]),
                  std::sqrt(stats::variance(groups[i])), ci.lo, ci.hi);
    out += line;
  }
  std::snprintf(line, sizeof(line), "one-way ANOVA: F(%d,%d) = %.4f, p = %.4g\n",
                anova.df_between, anova.df_within, anova.f, anova.p_value);
  out += line;
  out += "pairwise vs first group (Cohen d, Welch t, p; neutral post-hoc substitute):\n";
  for (std::size_t i = 1; i < groups.size(); ++i) {
    const double d = stats::cohens_d(groups[0], groups[i]);
    const auto w = stats::welch_t(groups[0], groups[i]);
    std::snprintf(line, sizeof(line), "  %-16s d = %8.4f   t = %8.4f   p = %.4g\n",
                  names[i].c_str(), d, w.t, w.p_two_sided);
    out += line;
  }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid-sequence NOMA handover simulator"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "scenario config file");
  app.add_option("--out", g.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "base seed");
  app.add_option("--jobs", g.jobs, "worker count for multi-seed suites")
      ->check(CLI::Range(1, 64));

  // ---- seq ----
  auto* seq_cmd = app.add_subcommand("seq", "codebook generation and analysis");
  seq_cmd->require_subcommand(1);
  std::string family = "gold";
  int seq_m = 5, seq_order = 32, seq_count = 0, claim_pairs = 8;

  auto* seq_gen = seq_cmd->add_subcommand("gen", "export a codebook as plain text");
  seq_gen->add_option("--family", family, "mseq|gold|walsh|kasami|hybrid")->required();
  seq_gen->add_option("--m", seq_m, "LFSR degree (gold/kasami/mseq/hybrid)");
  seq_gen->add_option("--order", seq_order, "walsh order (walsh/hybrid)");
  seq_gen->add_option("--count", seq_count, "hybrid codebook size");

  auto* seq_analyze = seq_cmd->add_subcommand("analyze", "correlation and PAPR reports");
  seq_analyze->add_option("--family", family, "mseq|gold|walsh|kasami|hybrid")->required();
  seq_analyze->add_option("--m", seq_m, "LFSR degree");
  seq_analyze->add_option("--order", seq_order, "walsh order");
  seq_analyze->add_option("--count", seq_count, "hybrid codebook size");
  seq_analyze->add_option("--pairs", claim_pairs, "pairs in the hybrid claim report");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train the DQN agent for a policy arm");
  std::string policy_name_arg = "hybrid_dqn";
  int episodes_override = -1;
  train_cmd->add_option("--policy", policy_name_arg, "hybrid_dqn|drl_conventional|ablation arms");
  train_cmd->add_option("--episodes", episodes_override, "training episodes");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a policy arm over seeds");
  std::string checkpoint_path;
  int seed_count = 5;
  eval_cmd->add_option("--policy", policy_name_arg, "policy arm")->required();
  eval_cmd->add_option("--checkpoint", checkpoint_path, "trained network (DQN arms)");
  eval_cmd->add_option("--seeds", seed_count, "number of evaluation seeds");
  eval_cmd->add_option("--episodes", episodes_override, "evaluation episodes per seed");

  // ---- suite ----
  auto* suite_cmd = app.add_subcommand("suite", "experiment batteries");
  suite_cmd->require_subcommand(1);
  auto* suite_compare = suite_cmd->add_subcommand("compare", "six-arm comparison");
  suite_compare->add_option("--seeds", seed_count, "evaluation seeds");
  suite_compare->add_option("--episodes", episodes_override, "training episodes");
  auto* suite_ablation = suite_cmd->add_subcommand("ablation", "component ablation table");
  suite_ablation->add_option("--seeds", seed_count, "evaluation seeds");
  suite_ablation->add_option("--episodes", episodes_override, "training episodes");
  auto* suite_velocity = suite_cmd->add_subcommand("velocity", "throughput vs user velocity");
  std::string speeds_arg = "3,30,60,120";
  suite_velocity->add_option("--policy", policy_name_arg, "policy arm");
  suite_velocity->add_option("--speeds", speeds_arg, "comma-separated km/h values");
  suite_velocity->add_option("--seeds", seed_count, "evaluation seeds");
  suite_velocity->add_option("--checkpoint", checkpoint_path, "trained network (DQN arms)");

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand("stats", "ANOVA/effect sizes over existing CSVs");
  std::vector<std::string> stat_inputs;
  std::string stat_column = "hsr";
  stats_cmd->add_option("--inputs", stat_inputs, "run CSV files (one group each)")->required();
  stats_cmd->add_option("--column", stat_column, "metric column");

  // ---- convergence ----
  auto* conv_cmd = app.add_subcommand("convergence", "phase detection on a training CSV");
  std::string conv_input;
  int conv_window = 50;
  double conv_plateau = 0.10;
  conv_cmd->add_option("--input", conv_input, "training history CSV")->required();
  conv_cmd->add_option("--window", conv_window, "moving-average window");
  conv_cmd->add_option("--plateau-frac", conv_plateau, "plateau tolerance fraction");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  std::string full_command;
  for (int i = 0; i < argc; ++i) full_command += std::string(i ? " " : "") + argv[i];

  try {
    if (*seq_gen) {
      const auto fam = generate_family(family, seq_m, seq_order, seq_count);
      const std::string path = g.out_dir + "/codebook_" + family + ".txt";
      experiments::write_file(path, seq::codebook_to_text(fam));
      write_sidecar(g.out_dir, full_command);
      std::cout << "wrote " << fam.size() << " sequences to " << path << "\n";
      return 0;
    }
    if (*seq_analyze) {
      const auto fam = generate_family(family, seq_m, seq_order, seq_count);
      std::string text = analyze_family(fam, family);
      if (family == "hybrid") {
        const auto report = seq::hybrid_claim_report(seq_m, seq_order, claim_pairs);
        text += "\n" + seq::render_claim_report(report);
      }
      const std::string path = g.out_dir + "/analyze_" + family + ".txt";
      experiments::write_file(path, text);
      write_sidecar(g.out_dir, full_command);
      std::cout << text;
      return 0;
    }
    if (*train_cmd) {
      auto cfg = experiment_config(g);
      if (episodes_override >= 0) cfg.schedule.episodes = episodes_override;
      if (cfg.schedule.episodes < 1)
        throw std::invalid_argument("training needs at least one episode");
      const Policy policy = experiments::policy_from_name(policy_name_arg);
      const auto trained = experiments::train_policy(policy, cfg, cfg.base_seed ^ 0x7472ull);
      experiments::write_file(g.out_dir + "/checkpoint.qnet", trained.network.save_text());
      experiments::write_file(
          g.out_dir + "/train.csv",
          experiments::train_history_to_csv(trained, policy, cfg.config_hash, cfg.base_seed));
      write_sidecar(g.out_dir, full_command);
      std::cout << "trained " << policy_name_arg << " for " << cfg.schedule.episodes
                << " episodes; checkpoint at " << g.out_dir << "/checkpoint.qnet\n";
      return 0;
    }
    if (*eval_cmd) {
      auto cfg = experiment_config(g);
      if (episodes_override >= 0) cfg.eval_episodes = episodes_override;
      if (cfg.eval_episodes < 1 || seed_count < 1)
        throw std::invalid_argument("evaluation needs at least one episode and one seed");
      const Policy policy = experiments::policy_from_name(policy_name_arg);
      dqn::QNetwork net;
      const dqn::QNetwork* net_ptr = nullptr;
      if (experiments::policy_uses_dqn(policy)) {
        if (checkpoint_path.empty())
          throw std::invalid_argument("policy needs --checkpoint");
        std::ifstream in(checkpoint_path);
        if (!in) throw std::runtime_error("cannot open checkpoint " + checkpoint_path);
        std::stringstream ss;
        ss << in.rdbuf();
        net = dqn::QNetwork::load_text(ss.str());
        net_ptr = &net;
      }
      const auto seeds = experiments::evaluation_seeds(cfg.base_seed, seed_count);
      const auto runs = experiments::run_scenario(policy, cfg, seeds, net_ptr);
      std::string csv;
      for (const auto& r : runs) csv += experiments::run_metrics_to_csv(r);
      const std::string path = g.out_dir + "/eval_" + policy_name_arg + ".csv";
      experiments::write_file(path, csv);
      write_sidecar(g.out_dir, full_command);
      std::cout << "evaluated " << policy_name_arg << " over " << seed_count
                << " seeds -> " << path << "\n";
      return 0;
    }
    if (*suite_compare) {
      auto cfg = experiment_config(g);
      if (episodes_override >= 0) cfg.schedule.episodes = episodes_override;
      const auto summary = experiments::suite_compare(cfg, seed_count, g.out_dir);
      write_sidecar(g.out_dir, full_command);
      std::printf("compare suite done: %d seeds, ANOVA on HSR F(%d,%d) = %.2f, p = %.4g\n",
                  summary.seeds, summary.anova_hsr.df_between, summary.anova_hsr.df_within,
                  summary.anova_hsr.f, summary.anova_hsr.p_value);
      for (const auto& arm : summary.arms)
        std::printf("  %-18s hsr %6.2f %%   thr %8.2f Mbps   intf %8.2f dBm\n",
                    experiments::policy_name(arm.policy), arm.hsr_mean, arm.throughput_mean,
                    arm.interference_dbm_mean);
      return 0;
    }
    if (*suite_ablation) {
      auto cfg = experiment_config(g);
      if (episodes_override >= 0) cfg.schedule.episodes = episodes_override;
      const auto summary = experiments::suite_ablation(cfg, seed_count, g.out_dir);
      write_sidecar(g.out_dir, full_command);
      for (const auto& row : summary.rows)
        std::printf("  %-18s hsr %6.2f %%   thr %8.2f Mbps   intf %8.2f dBm\n",
                    experiments::policy_name(row.policy), row.hsr_mean, row.throughput_mean,
                    row.interference_dbm_mean);
      return 0;
    }
    if (*suite_velocity) {
      auto cfg = experiment_config(g);
      const Policy policy = experiments::policy_from_name(policy_name_arg);
      dqn::QNetwork net;
      const dqn::QNetwork* net_ptr = nullptr;
      if (experiments::policy_uses_dqn(policy)) {
        if (checkpoint_path.empty()) {
          const auto trained =
              experiments::train_policy(policy, cfg, cfg.base_seed ^ 0x7472ull);
          net = trained.network;
        } else {
          std::ifstream in(checkpoint_path);
          if (!in) throw std::runtime_error("cannot open checkpoint " + checkpoint_path);
          std::stringstream ss;
          ss << in.rdbuf();
          net = dqn::QNetwork::load_text(ss.str());
        }
        net_ptr = &net;
      }
      std::vector<double> speeds;
      std::stringstream ss(speeds_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) speeds.push_back(std::stod(tok));
      const auto points =
          experiments::velocity_sweep(policy, speeds, cfg, seed_count, g.out_dir, net_ptr);
      write_sidecar(g.out_dir, full_command);
      for (const auto& p : points)
        std::printf("  %6.1f km/h: hsr %6.2f %%  thr %8.2f Mbps  attempts/ep %.2f\n",
                    p.speed_kmh, p.summary.hsr_mean, p.summary.throughput_mean,
                    p.mean_attempts_per_episode);
      return 0;
    }
    if (*stats_cmd) {
      std::vector<std::string> names;
      std::vector<std::vector<double>> groups;
      for (const auto& path : stat_inputs) {
        auto vals = read_csv_column(path, stat_column);
        if (vals.size() < 2)
          throw std::runtime_error("not enough usable rows in " + path);
        names.push_back(path);
        groups.push_back(std::move(vals));
      }
      if (groups.size() < 2) throw std::invalid_argument("stats needs at least two inputs");
      const std::string table = render_stats_table(names, groups);
      std::cout << table;
      const auto anova = stats::one_way_anova(groups);
      nlohmann::ordered_json j;
      j["column"] = stat_column;
      j["f"] = anova.f;
      j["df_between"] = anova.df_between;
      j["df_within"] = anova.df_within;
      j["p_value"] = anova.p_value;
      experiments::write_file(g.out_dir + "/stats_" + stat_column + ".json", j.dump(2) + "\n");
      write_sidecar(g.out_dir, full_command);
      return 0;
    }
    if (*conv_cmd) {
      const auto rewards = read_csv_column(conv_input, "reward");
      dqn::ConvergenceParams params;
      params.window = conv_window;
      params.plateau_frac = conv_plateau;
      const auto phases = dqn::detect_convergence(rewards, params);
      if (phases.converged)
        std::printf("converged at episode %d (exploration ends at %d)\n",
                    phases.convergence_episode, phases.exploration_end);
      else
        std::printf("not converged\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
