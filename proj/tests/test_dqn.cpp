#include <doctest.h>

#include <cmath>
#include <map>

#include "common/rng.hpp"
#include "dqn/convergence.hpp"
#include "dqn/network.hpp"
#include "dqn/replay.hpp"
#include "dqn/trainer.hpp"
#include "stats/stats.hpp"

using namespace hynoma;
using dqn::QNetwork;

// ---- finite-difference oracle -------------------------------------------

static double loss_only(const QNetwork& net, const std::vector<std::vector<double>>& states,
                        const std::vector<int>& actions, const std::vector<double>& targets,
                        const std::vector<double>& weights, double delta) {
  auto grads = net.zero_gradients();
  return net.loss_and_gradients(states, actions, targets, weights, delta, grads, nullptr);
}

TEST_CASE("forward: zero parameters give zero Q values") {
  Rng rng(1);
  QNetwork net({3, 4, 2}, 0.0, rng);
  for (auto& layer : net.weights())
    for (auto& w : layer) w = 0.0;
  for (auto& layer : net.biases())
    for (auto& b : layer) b = 0.0;
  const auto q = net.forward({0.3, -0.5, 0.9});
  for (double v : q) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("forward: ReLU clips negative pre-activations") {
  Rng rng(1);
  QNetwork net({1, 1, 1}, 0.0, rng);
  net.weights()[0] = {1.0};
  net.biases()[0] = {0.0};
  net.weights()[1] = {1.0};
  net.biases()[1] = {0.0};
  CHECK(net.forward({-2.0})[0] == doctest::Approx(0.0)); // hidden ReLU kills it
  CHECK(net.forward({1.5})[0] == doctest::Approx(1.5));
}

TEST_CASE("forward: tiny net against hand-computed values") {
  Rng rng(1);
  QNetwork net({2, 2, 2}, 0.0, rng);
  // hidden: h = relu(W0 x + b0), W0 = [[1, 2], [-1, 0.5]], b0 = [0.5, -0.25]
  net.weights()[0] = {1.0, 2.0, -1.0, 0.5};
  net.biases()[0] = {0.5, -0.25};
  // output: q = W1 h + b1, W1 = [[0.5, -1], [2, 1]], b1 = [0.1, -0.2]
  net.weights()[1] = {0.5, -1.0, 2.0, 1.0};
  net.biases()[1] = {0.1, -0.2};
  // x = (1, -0.5): pre-hidden = (1 - 1 + 0.5, -1 - 0.25 - ... )
  // h0 = relu(1*1 + 2*(-0.5) + 0.5) = relu(0.5) = 0.5
  // h1 = relu(-1*1 + 0.5*(-0.5) - 0.25) = relu(-1.5) = 0
  // q0 = 0.5*0.5 - 1*0 + 0.1 = 0.35 ; q1 = 2*0.5 + 1*0 - 0.2 = 0.8
  const auto q = net.forward({1.0, -0.5});
  CHECK(q[0] == doctest::Approx(0.35).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatch") {
  Rng rng(1);
  QNetwork net({3, 4, 2}, 0.0, rng);
  CHECK_THROWS_AS(net.forward({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences on random nets") {
  Rng rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    QNetwork net({2, 3, 2}, 0.0, rng);
    std::vector<std::vector<double>> states;
    std::vector<int> actions;
    std::vector<double> targets, weights;
    const int batch = 4;
    for (int i = 0; i < batch; ++i) {
      states.push_back({rng.normal(), rng.normal()});
      actions.push_back(static_cast<int>(rng.uniform_int(2)));
      targets.push_back(rng.normal() * 2.0);
      weights.push_back(rng.uniform(0.2, 1.0));
    }
    const double delta = 1.0;

    auto grads = net.zero_gradients();
    net.loss_and_gradients(states, actions, targets, weights, delta, grads, nullptr);

    const double h = 1e-6;
    double max_rel = 0.0;
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
      for (std::size_t i = 0; i < net.weights()[l].size(); ++i) {
        const double orig = net.weights()[l][i];
        net.weights()[l][i] = orig + h;
        const double up = loss_only(net, states, actions, targets, weights, delta);
        net.weights()[l][i] = orig - h;
        const double dn = loss_only(net, states, actions, targets, weights, delta);
        net.weights()[l][i] = orig;
        const double fd = (up - dn) / (2.0 * h);
        const double an = grads.weights[l][i];
        const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
        max_rel = std::max(max_rel, rel);
      }
      for (std::size_t i = 0; i < net.biases()[l].size(); ++i) {
        const double orig = net.biases()[l][i];
        net.biases()[l][i] = orig + h;
        const double up = loss_only(net, states, actions, targets, weights, delta);
        net.biases()[l][i] = orig - h;
        const double dn = loss_only(net, states, actions, targets, weights, delta);
        net.biases()[l][i] = orig;
        const double fd = (up - dn) / (2.0 * h);
        const double an = grads.biases[l][i];
        const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
        max_rel = std::max(max_rel, rel);
      }
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("zero TD error yields zero gradients") {
  Rng rng(5);
  QNetwork net({2, 3, 2}, 0.0, rng);
  const std::vector<std::vector<double>> states{{0.2, -0.4}};
  const std::vector<int> actions{1};
  const std::vector<double> targets{net.forward(states[0])[1]}; // q == y exactly
  const std::vector<double> weights{1.0};
  auto grads = net.zero_gradients();
  const double loss = net.loss_and_gradients(states, actions, targets, weights, 1.0, grads, nullptr);
  CHECK(loss == doctest::Approx(0.0));
  CHECK(grads.max_abs() == doctest::Approx(0.0));
}

TEST_CASE("doubling importance weights doubles the gradients") {
  Rng rng(6);
  QNetwork net({2, 3, 2}, 0.0, rng);
  const std::vector<std::vector<double>> states{{0.2, -0.4}, {1.0, 0.1}};
  const std::vector<int> actions{0, 1};
  const std::vector<double> targets{0.7, -0.3};
  const std::vector<double> w1{0.5, 0.8}, w2{1.0, 1.6};
  auto g1 = net.zero_gradients(), g2 = net.zero_gradients();
  net.loss_and_gradients(states, actions, targets, w1, 1.0, g1, nullptr);
  net.loss_and_gradients(states, actions, targets, w2, 1.0, g2, nullptr);
  for (std::size_t l = 0; l < g1.weights.size(); ++l)
    for (std::size_t i = 0; i < g1.weights[l].size(); ++i)
      CHECK(g2.weights[l][i] == doctest::Approx(2.0 * g1.weights[l][i]).epsilon(1e-12));
}

TEST_CASE("select_action: epsilon 1 explores uniformly (chi-square)") {
  Rng rng(10);
  QNetwork net({2, 4, 5}, 0.0, rng);
  std::vector<long long> counts(5, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    ++counts[dqn::select_action(net, {0.1, 0.2}, 1.0, rng)];
  std::vector<double> expected(5, draws / 5.0);
  CHECK(stats::chi_square_gof_p(counts, expected) > 0.01);
}

TEST_CASE("select_action: greedy argmax with lowest-index tie break") {
  Rng rng(2);
  QNetwork net({1, 2, 3}, 0.0, rng);
  net.weights()[0] = {0.0, 0.0};
  net.biases()[0] = {0.0, 0.0};
  net.weights()[1] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  net.biases()[1] = {0.1, 0.9, 0.3};
  CHECK(dqn::select_action(net, {0.5}, 0.0, rng) == 1);
  net.biases()[1] = {0.4, 0.4, 0.4}; // all equal -> lowest index
  CHECK(dqn::select_action(net, {0.5}, 0.0, rng) == 0);
}

// ---- sum tree and replay --------------------------------------------------

TEST_CASE("sum tree: root equals the leaf sum under random updates") {
  dqn::SumTree tree(1000);
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const int leaf = static_cast<int>(rng.uniform_int(1000));
    tree.update(leaf, rng.uniform(0.0, 10.0));
  }
  const double exact = tree.recompute_total();
  CHECK(std::abs(tree.total() - exact) <= 1e-6 * std::max(1.0, exact));
}

TEST_CASE("sum tree: descent lands in the cumulative interval of its leaf") {
  dqn::SumTree tree(37);
  Rng rng(4);
  for (int i = 0; i < 37; ++i) tree.update(i, rng.uniform(0.01, 5.0));
  for (int trial = 0; trial < 2000; ++trial) {
    const double mass = rng.uniform() * tree.total();
    const int leaf = tree.find(mass);
    double prefix = 0.0;
    for (int i = 0; i < leaf; ++i) prefix += tree.leaf(i);
    CHECK(mass >= prefix - 1e-9);
    CHECK(mass < prefix + tree.leaf(leaf) + 1e-9);
  }
}

static dqn::Transition make_transition(double r) {
  dqn::Transition t;
  t.state = {r, 0.0};
  t.action = 0;
  t.reward = r;
  t.next_state = {0.0, r};
  t.done = false;
  return t;
}

TEST_CASE("replay: underfull buffer refuses to sample") {
  dqn::ReplayBuffer buf(100, 0.6, 1e-3);
  buf.add(make_transition(1.0));
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(2, 0.4, rng), std::invalid_argument);
}

TEST_CASE("replay: equal priorities sample uniformly (chi-square)") {
  const int n = 16;
  dqn::ReplayBuffer buf(n, 0.6, 1e-3);
  for (int i = 0; i < n; ++i) buf.add(make_transition(static_cast<double>(i)));
  Rng rng(8);
  std::vector<long long> counts(n, 0);
  const int rounds = 100000 / 4;
  for (int r = 0; r < rounds; ++r) {
    const auto batch = buf.sample(4, 0.4, rng);
    for (int idx : batch.indices) ++counts[idx];
  }
  std::vector<double> expected(n, rounds * 4.0 / n);
  CHECK(stats::chi_square_gof_p(counts, expected) > 0.01);
}

TEST_CASE("replay: a dominant priority dominates the samples") {
  const int n = 64;
  dqn::ReplayBuffer buf(n, 1.0, 1e-6); // alpha 1: probabilities proportional to raw priority
  for (int i = 0; i < n; ++i) buf.add(make_transition(static_cast<double>(i)));
  // one leaf holds ~99% of the mass
  for (int i = 0; i < n; ++i) buf.update_priority(i, 0.01 / (n - 1));
  buf.update_priority(7, 0.99);
  Rng rng(9);
  int hits = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto batch = buf.sample(1, 1.0, rng);
    if (batch.indices[0] == 7) ++hits;
  }
  CHECK(hits >= static_cast<int>(0.95 * trials));
}

TEST_CASE("replay: full-buffer stratified sampling with equal priorities covers every slot") {
  const int n = 32;
  dqn::ReplayBuffer buf(n, 0.6, 1e-3);
  for (int i = 0; i < n; ++i) buf.add(make_transition(static_cast<double>(i)));
  Rng rng(10);
  const auto batch = buf.sample(n, 0.4, rng);
  std::set<int> unique(batch.indices.begin(), batch.indices.end());
  CHECK(unique.size() == static_cast<std::size_t>(n)); // one sample per stratum
}

TEST_CASE("replay: importance weights are max-normalized, flat at beta with equal priorities") {
  const int n = 8;
  dqn::ReplayBuffer buf(n, 0.6, 1e-3);
  for (int i = 0; i < n; ++i) buf.add(make_transition(1.0));
  Rng rng(11);
  const auto batch = buf.sample(4, 1.0, rng);
  for (double w : batch.is_weights) CHECK(w == doctest::Approx(1.0));
}

// ---- train_step semantics ---------------------------------------------------

TEST_CASE("train_step: terminal targets equal the reward; gamma 0 is myopic") {
  Rng rng(21);
  dqn::TrainSchedule sched;
  sched.batch_size = 4;
  sched.gamma = 0.9;
  sched.target_update_period = 1000000;
  sched.dropout = 0.0;

  QNetwork online({2, 8, 3}, 0.0, rng);
  QNetwork target = online;
  dqn::ReplayBuffer buf(64, 0.6, 1e-3);
  for (int i = 0; i < 16; ++i) {
    auto t = make_transition(rng.uniform());
    t.action = static_cast<int>(rng.uniform_int(3));
    t.done = true; // all terminal: y = r exactly
    buf.add(std::move(t));
  }
  long counter = 0;
  const double loss = dqn::train_step(online, target, buf, sched, counter, 0.5, rng);
  CHECK(std::isfinite(loss));
  CHECK(counter == 1);

  // gamma = 0 equals the all-terminal myopic case on identical nets
  Rng rng2(21);
  QNetwork online2({2, 8, 3}, 0.0, rng2);
  dqn::TrainSchedule myopic = sched;
  myopic.gamma = 0.0;
  dqn::ReplayBuffer buf2(64, 0.6, 1e-3);
  for (int i = 0; i < 16; ++i) {
    auto t = make_transition(rng2.uniform());
    t.action = static_cast<int>(rng2.uniform_int(3));
    t.done = false; // bootstrap present but weighted by gamma = 0
    buf2.add(std::move(t));
  }
  QNetwork target2 = online2;
  long counter2 = 0;
  const double loss2 = dqn::train_step(online2, target2, buf2, myopic, counter2, 0.5, rng2);
  CHECK(loss2 == doctest::Approx(loss).epsilon(1e-12));
}

TEST_CASE("train_step: target network stays bit-identical between syncs") {
  Rng rng(31);
  dqn::TrainSchedule sched;
  sched.batch_size = 8;
  sched.target_update_period = 5;
  sched.dropout = 0.0;
  QNetwork online({2, 8, 3}, 0.0, rng);
  QNetwork target = online;
  const QNetwork at_sync = target;
  dqn::ReplayBuffer buf(128, 0.6, 1e-3);
  for (int i = 0; i < 32; ++i) {
    auto t = make_transition(rng.uniform());
    t.action = static_cast<int>(rng.uniform_int(3));
    buf.add(std::move(t));
  }
  long counter = 0;
  for (int s = 0; s < 4; ++s) {
    dqn::train_step(online, target, buf, sched, counter, 0.5, rng);
    CHECK(target.params_equal(at_sync)); // untouched until step 5
  }
  dqn::train_step(online, target, buf, sched, counter, 0.5, rng);
  CHECK(target.params_equal(online)); // synced exactly at C
}

TEST_CASE("tabular q-learning converges to the value-iteration fixed point") {
  // 2-state, 2-action MDP: deterministic transitions
  //   s0: a0 -> s0 r=0 ; a1 -> s1 r=1
  //   s1: a0 -> s0 r=2 ; a1 -> s1 r=0
  const double gamma = 0.9;
  auto next_state = [](int s, int a) { return a == 0 ? 0 : 1; };
  auto reward = [](int s, int a) {
    if (s == 0) return a == 1 ? 1.0 : 0.0;
    return a == 0 ? 2.0 : 0.0;
  };
  (void)next_state;

  // oracle: value iteration to the fixed point
  double q_star[2][2] = {{0, 0}, {0, 0}};
  for (int it = 0; it < 2000; ++it) {
    double next[2][2];
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const int ns = a == 0 ? 0 : 1;
        next[s][a] = reward(s, a) + gamma * std::max(q_star[ns][0], q_star[ns][1]);
      }
    std::copy(&next[0][0], &next[0][0] + 4, &q_star[0][0]);
  }

  dqn::TabularQLearner learner(2, 2);
  Rng rng(17);
  int s = 0;
  for (int step = 0; step < 400000; ++step) {
    const int a = rng.uniform() < 0.2 ? static_cast<int>(rng.uniform_int(2))
                                      : learner.best_action(s);
    const int ns = a == 0 ? 0 : 1;
    learner.update(s, a, reward(s, a), ns, false, 0.05, gamma);
    s = ns;
  }
  for (int st = 0; st < 2; ++st)
    for (int a = 0; a < 2; ++a)
      CHECK(learner.q(st, a) == doctest::Approx(q_star[st][a]).epsilon(1e-3));

  // Bellman residual at the learned table is small (contraction fixed point)
  double residual = 0.0;
  for (int st = 0; st < 2; ++st)
    for (int a = 0; a < 2; ++a) {
      const int ns = a == 0 ? 0 : 1;
      const double t = reward(st, a) + gamma * learner.max_q(ns);
      residual = std::max(residual, std::abs(t - learner.q(st, a)));
    }
  CHECK(residual < 1e-3);
}

TEST_CASE("checkpoint text round-trips losslessly") {
  Rng rng(41);
  QNetwork net({7, 16, 16, 12}, 0.1, rng);
  const auto text = net.save_text();
  const auto back = QNetwork::load_text(text);
  CHECK(back.params_equal(net));
  CHECK(back.sizes() == net.sizes());
  CHECK(back.dropout() == doctest::Approx(net.dropout()));
  CHECK(back.save_text() == text);
  CHECK_THROWS(QNetwork::load_text("garbage"));
}

// ---- convergence detector ---------------------------------------------------

TEST_CASE("convergence: constant series converges at episode W") {
  dqn::ConvergenceParams p;
  p.window = 50;
  std::vector<double> rewards(100, 2.5);
  const auto r = dqn::detect_convergence(rewards, p);
  CHECK(r.converged);
  CHECK(r.convergence_episode == 50);
}

TEST_CASE("convergence: strictly increasing series does not converge") {
  dqn::ConvergenceParams p;
  p.window = 50;
  std::vector<double> rewards;
  for (int i = 0; i < 400; ++i) rewards.push_back(0.01 * i);
  const auto r = dqn::detect_convergence(rewards, p);
  CHECK(!r.converged);
}

TEST_CASE("convergence: ramp then plateau at 500 is detected within one window") {
  dqn::ConvergenceParams p;
  p.window = 50;
  std::vector<double> rewards;
  for (int i = 1; i <= 1000; ++i) rewards.push_back(i < 500 ? i / 500.0 : 1.0);
  const auto r = dqn::detect_convergence(rewards, p);
  REQUIRE(r.converged);
  CHECK(std::abs(r.convergence_episode - 500) <= p.window);
  CHECK(r.exploration_end <= r.convergence_episode);
}

TEST_CASE("convergence: history shorter than 2 windows is rejected") {
  std::vector<double> rewards(60, 1.0);
  dqn::ConvergenceParams p;
  p.window = 50;
  CHECK_THROWS_AS(dqn::detect_convergence(rewards, p), std::invalid_argument);
}
