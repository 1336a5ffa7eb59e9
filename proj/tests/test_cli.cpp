#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// end-to-end checks of the installed binary via a shell

namespace {

const std::string kBin = HYNOMA_BIN;

struct CmdResult {
  int exit_code = 0;
  std::string output;
};

CmdResult run(const std::string& args) {
  const std::string out_file = "/tmp/hynoma_cli_out.txt";
  const std::string cmd = kBin + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("--help exits 0 on every subcommand") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("seq --help").exit_code == 0);
  CHECK(run("seq gen --help").exit_code == 0);
  CHECK(run("seq analyze --help").exit_code == 0);
  CHECK(run("train --help").exit_code == 0);
  CHECK(run("eval --help").exit_code == 0);
  CHECK(run("suite --help").exit_code == 0);
  CHECK(run("suite compare --help").exit_code == 0);
  CHECK(run("stats --help").exit_code == 0);
}

TEST_CASE("unknown subcommands and flags fail with nonzero exit") {
  CHECK(run("frobnicate").exit_code != 0);
  CHECK(run("seq gen --family gold --no-such-flag 3").exit_code != 0);
}

TEST_CASE("seq gen gold m=5 writes a 33-sequence codebook") {
  const auto r = run("--out /tmp/hynoma_cli_seq seq gen --family gold --m 5");
  CHECK(r.exit_code == 0);
  const auto text = slurp("/tmp/hynoma_cli_seq/codebook_gold.txt");
  int headers = 0;
  std::stringstream ss(text);
  std::string line;
  bool chips_next = false;
  while (std::getline(ss, line)) {
    if (!chips_next) {
      CHECK(line.rfind("gold 31 ", 0) == 0);
      ++headers;
      chips_next = true;
    } else {
      CHECK(line.size() == 31);
      for (char c : line) CHECK((c == '+' || c == '-'));
      chips_next = false;
    }
  }
  CHECK(headers == 33);
}

TEST_CASE("seq gen rejects unsupported degrees") {
  CHECK(run("--out /tmp/hynoma_cli_seq seq gen --family gold --m 4").exit_code != 0);
}

TEST_CASE("train --episodes 0 is a validation error") {
  const auto r = run("--out /tmp/hynoma_cli_train train --policy hybrid_dqn --episodes 0");
  CHECK(r.exit_code != 0);
}

TEST_CASE("byte-identical reruns for seq gen") {
  CHECK(run("--out /tmp/hynoma_cli_det1 seq gen --family walsh --order 32").exit_code == 0);
  CHECK(run("--out /tmp/hynoma_cli_det2 seq gen --family walsh --order 32").exit_code == 0);
  CHECK(slurp("/tmp/hynoma_cli_det1/codebook_walsh.txt") ==
        slurp("/tmp/hynoma_cli_det2/codebook_walsh.txt"));
}

TEST_CASE("eval produces a CSV with provenance and reruns byte-identically") {
  const std::string cfg_path = "/tmp/hynoma_cli_eval.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "rings = 1\nusers_per_cell = 6\nepisode_ticks = 40\neval_episodes = 2\n"
           "velocity_kmh_min = 30\nvelocity_kmh_max = 120\nseed = 3\n";
  }
  const std::string cmd = "--config " + cfg_path +
                          " --out /tmp/hynoma_cli_evalA eval --policy gold_only --seeds 2";
  CHECK(run(cmd).exit_code == 0);
  const std::string cmd2 = "--config " + cfg_path +
                           " --out /tmp/hynoma_cli_evalB eval --policy gold_only --seeds 2";
  CHECK(run(cmd2).exit_code == 0);
  const auto a = slurp("/tmp/hynoma_cli_evalA/eval_gold_only.csv");
  CHECK(a == slurp("/tmp/hynoma_cli_evalB/eval_gold_only.csv"));
  CHECK(a.find("# policy = gold_only") != std::string::npos);
  CHECK(a.find("# config_hash = ") != std::string::npos);
  CHECK(a.find("episode,hsr,throughput_mbps,interference_dbm,reward,ho_success,ho_rlf,ho_pingpong") !=
        std::string::npos);
}

TEST_CASE("eval of a DQN arm without a checkpoint fails cleanly") {
  const auto r = run("--out /tmp/hynoma_cli_evalX eval --policy hybrid_dqn --seeds 1");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("checkpoint") != std::string::npos);
}

TEST_CASE("stats subcommand runs ANOVA over run CSVs") {
  // build two tiny CSVs with distinct hsr levels in the run format
  const char* a_path = "/tmp/hynoma_cli_stats_a.csv";
  const char* b_path = "/tmp/hynoma_cli_stats_b.csv";
  {
    std::ofstream a(a_path);
    a << "# policy = x\nepisode,hsr,reward\n1,90.0,1\n2,92.0,1\n3,91.0,1\n";
    std::ofstream b(b_path);
    b << "# policy = y\nepisode,hsr,reward\n1,70.0,1\n2,72.0,1\n3,71.0,1\n";
  }
  const auto r = run(std::string("--out /tmp/hynoma_cli_stats stats --inputs ") + a_path + " " +
                     b_path + " --column hsr");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("one-way ANOVA") != std::string::npos);
  const auto json = slurp("/tmp/hynoma_cli_stats/stats_hsr.json");
  CHECK(json.find("\"p_value\"") != std::string::npos);
}

TEST_CASE("golden file: codebook format is stable") {
  CHECK(run("--out /tmp/hynoma_cli_golden seq gen --family walsh --order 4").exit_code == 0);
  const auto text = slurp("/tmp/hynoma_cli_golden/codebook_walsh.txt");
  const auto golden = slurp(std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/codebook_walsh4.txt");
  CHECK(text == golden);
}

TEST_CASE("golden file: run CSV format is stable") {
  const std::string cfg_path = "/tmp/hynoma_cli_golden.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "rings = 1\nusers_per_cell = 4\nepisode_ticks = 10\neval_episodes = 2\n"
           "velocity_kmh_min = 60\nvelocity_kmh_max = 60\nseed = 12\n";
  }
  CHECK(run("--config " + cfg_path +
            " --out /tmp/hynoma_cli_goldenrun eval --policy walsh_only --seeds 1")
            .exit_code == 0);
  const auto text = slurp("/tmp/hynoma_cli_goldenrun/eval_walsh_only.csv");
  const auto golden = slurp(std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/eval_walsh_only.csv");
  CHECK(text == golden);
}

TEST_CASE("sidecar carries the timestamp so data files need none") {
  CHECK(run("--out /tmp/hynoma_cli_meta seq gen --family gold --m 5").exit_code == 0);
  const auto meta = slurp("/tmp/hynoma_cli_meta/run.meta");
  CHECK(meta.find("timestamp = ") != std::string::npos);
  const auto data = slurp("/tmp/hynoma_cli_meta/codebook_gold.txt");
  CHECK(data.find("timestamp") == std::string::npos);
}

TEST_CASE("golden files: training CSV and summary JSON formats are stable") {
  const std::string cfg_path = "/tmp/hynoma_cli_suite.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "rings = 1\nusers_per_cell = 6\nepisode_ticks = 60\neval_episodes = 2\n"
           "velocity_kmh_min = 60\nvelocity_kmh_max = 120\n"
           "tagged_velocity_kmh_min = 100\ntagged_velocity_kmh_max = 120\n"
           "gamma_fail_db = 3\ninter_isolation_db = -3\nmobility_pad_m = 400\n"
           "dqn.episodes = 3\ndqn.warmup = 50\ndqn.hidden1 = 16\ndqn.hidden2 = 16\n"
           "dqn.replay_capacity = 2000\nseed = 5\n";
  }
  CHECK(run("--config " + cfg_path + " --out /tmp/hynoma_cli_suiteout suite compare --seeds 3")
            .exit_code == 0);
  CHECK(slurp("/tmp/hynoma_cli_suiteout/summary.json") ==
        slurp(std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/summary_smoke.json"));

  CHECK(run("--config " + cfg_path + " --out /tmp/hynoma_cli_trainout train --policy hybrid_dqn")
            .exit_code == 0);
  CHECK(slurp("/tmp/hynoma_cli_trainout/train.csv") ==
        slurp(std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/train_smoke.csv"));
}

TEST_CASE("golden file: stats JSON format is stable") {
  const std::string inputs = std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/stats_input_a.csv " +
                             std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/stats_input_b.csv";
  CHECK(run("--out /tmp/hynoma_cli_statsg stats --inputs " + inputs + " --column hsr")
            .exit_code == 0);
  CHECK(slurp("/tmp/hynoma_cli_statsg/stats_hsr.json") ==
        slurp(std::string(HYNOMA_SOURCE_DIR) + "/tests/golden/stats_hsr.json"));
}

TEST_CASE("suite ablation and velocity run end to end at smoke scale") {
  const std::string cfg_path = "/tmp/hynoma_cli_suite.cfg"; // written by the suite golden test
  {
    std::ofstream cfg(cfg_path);
    cfg << "rings = 1\nusers_per_cell = 6\nepisode_ticks = 60\neval_episodes = 2\n"
           "velocity_kmh_min = 60\nvelocity_kmh_max = 120\n"
           "tagged_velocity_kmh_min = 100\ntagged_velocity_kmh_max = 120\n"
           "gamma_fail_db = 3\ninter_isolation_db = -3\nmobility_pad_m = 400\n"
           "dqn.episodes = 3\ndqn.warmup = 50\ndqn.hidden1 = 16\ndqn.hidden2 = 16\n"
           "dqn.replay_capacity = 2000\nseed = 5\n";
  }
  const auto ab =
      run("--config " + cfg_path + " --out /tmp/hynoma_cli_ablation suite ablation --seeds 2");
  CHECK(ab.exit_code == 0);
  const auto json = slurp("/tmp/hynoma_cli_ablation/ablation_summary.json");
  for (const char* name :
       {"hybrid_dqn", "no_dqn_power", "no_dqn_sequence", "no_gold", "no_walsh"})
    CHECK(json.find(name) != std::string::npos);

  const auto vel = run("--config " + cfg_path +
                       " --out /tmp/hynoma_cli_vel suite velocity --policy gold_only "
                       "--speeds 3,120 --seeds 2");
  CHECK(vel.exit_code == 0);
  const auto vjson = slurp("/tmp/hynoma_cli_vel/velocity_gold_only.json");
  CHECK(vjson.find("\"speed_kmh\": 3.0") != std::string::npos);
  CHECK(vjson.find("\"speed_kmh\": 120.0") != std::string::npos);
}
