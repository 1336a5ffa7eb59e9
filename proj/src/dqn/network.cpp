#include "dqn/network.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "common/rng.hpp"

namespace hynoma::dqn {

QNetwork::QNetwork(const std::vector<int>& sizes, double dropout, Rng& rng)
    : sizes_(sizes), dropout_(dropout) {
  if (sizes.size() < 2) throw std::invalid_argument("network needs at least two layers");
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must be in [0, 1)");

  const int layers = static_cast<int>(sizes.size()) - 1;
  weights_.resize(layers);
  biases_.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    weights_[l].resize(static_cast<std::size_t>(in) * out);
    biases_[l].assign(out, 0.0);
    // He initialization for the ReLU stack
    const double scale = std::sqrt(2.0 / in);
    for (auto& w : weights_[l]) w = rng.normal() * scale;
  }
}

namespace {

struct ForwardTrace {
  std::vector<std::vector<double>> activations; // activations[0] = input
  std::vector<std::vector<double>> masks;       // dropout masks per hidden layer
};

std::vector<double> run_forward(const std::vector<int>& sizes,
                                const std::vector<std::vector<double>>& weights,
                                const std::vector<std::vector<double>>& biases,
                                const std::vector<double>& state, double dropout, Rng* train_rng,
                                ForwardTrace* trace) {
  if (static_cast<int>(state.size()) != sizes.front())
    throw std::invalid_argument("state dimension mismatch");
  const int layers = static_cast<int>(sizes.size()) - 1;
  std::vector<double> cur = state;
  if (trace) {
    trace->activations.clear();
    trace->masks.assign(layers, {});
    trace->activations.push_back(cur);
  }
  for (int l = 0; l < layers; ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    std::vector<double> next(out);
    for (int o = 0; o < out; ++o) {
      double acc = biases[l][o];
      const double* row = &weights[l][static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
      next[o] = acc;
    }
    if (l < layers - 1) {
      for (double& v : next) v = v > 0.0 ? v : 0.0; // ReLU on hidden layers
      if (train_rng && dropout > 0.0) {
        std::vector<double> mask(out);
        const double keep = 1.0 - dropout;
        for (int o = 0; o < out; ++o) {
          mask[o] = train_rng->uniform() < keep ? 1.0 / keep : 0.0;
          next[o] *= mask[o];
        }
        if (trace) trace->masks[l] = std::move(mask);
      }
    }
    cur = std::move(next);
    if (trace) trace->activations.push_back(cur);
  }
  return cur;
}

} // namespace

std::vector<double> QNetwork::forward(const std::vector<double>& state) const {
  return run_forward(sizes_, weights_, biases_, state, 0.0, nullptr, nullptr);
}

QNetwork::Gradients QNetwork::zero_gradients() const {
  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(biases_.size());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights[l].assign(weights_[l].size(), 0.0);
    g.biases[l].assign(biases_[l].size(), 0.0);
  }
  return g;
}

void QNetwork::Gradients::scale(double s) {
  for (auto& layer : weights)
    for (auto& v : layer) v *= s;
  for (auto& layer : biases)
    for (auto& v : layer) v *= s;
}

double QNetwork::Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& layer : weights)
    for (double v : layer) m = std::max(m, std::abs(v));
  for (const auto& layer : biases)
    for (double v : layer) m = std::max(m, std::abs(v));
  return m;
}

double QNetwork::loss_and_gradients(const std::vector<std::vector<double>>& states,
                                    const std::vector<int>& actions,
                                    const std::vector<double>& targets,
                                    const std::vector<double>& is_weights, double huber_delta,
                                    Gradients& grads, Rng* train_rng,
                                    std::vector<double>* td_out) const {
  const std::size_t batch = states.size();
  if (batch == 0) throw std::invalid_argument("empty batch");
  if (actions.size() != batch || targets.size() != batch || is_weights.size() != batch)
    throw std::invalid_argument("batch array sizes mismatch");
  if (td_out) td_out->assign(batch, 0.0);

  const int layers = static_cast<int>(sizes_.size()) - 1;
  double loss = 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  ForwardTrace trace;
  for (std::size_t s = 0; s < batch; ++s) {
    const auto q = run_forward(sizes_, weights_, biases_, states[s], dropout_, train_rng, &trace);
    const int a = actions[s];
    if (a < 0 || a >= output_dim()) throw std::invalid_argument("action id out of range");
    const double err = q[a] - targets[s];
    if (td_out) (*td_out)[s] = err;

    const double w = is_weights[s];
    if (std::abs(err) <= huber_delta)
      loss += w * 0.5 * err * err * inv_batch;
    else
      loss += w * huber_delta * (std::abs(err) - 0.5 * huber_delta) * inv_batch;

    // dL/dq[a], clipped by the Huber knee
    const double dq = w * inv_batch * std::clamp(err, -huber_delta, huber_delta);

    // backprop
    std::vector<double> delta(output_dim(), 0.0);
    delta[a] = dq;
    for (int l = layers - 1; l >= 0; --l) {
      const int in = sizes_[l], out = sizes_[l + 1];
      const auto& act_in = trace.activations[l];
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        grads.biases[l][o] += d;
        double* wrow = &grads.weights[l][static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) wrow[i] += d * act_in[i];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        const double* wrow = &weights_[l][static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) prev[i] += d * wrow[i];
      }
      // through dropout and ReLU of the hidden layer below
      const auto& act = trace.activations[l];
      const auto& mask = trace.masks[l - 1];
      for (int i = 0; i < in; ++i) {
        if (!mask.empty()) prev[i] *= mask[i];
        if (act[i] <= 0.0) prev[i] = 0.0;
      }
      delta = std::move(prev);
    }
  }
  return loss;
}

void QNetwork::sgd_step(const Gradients& grads, double lr) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (std::size_t i = 0; i < weights_[l].size(); ++i) weights_[l][i] -= lr * grads.weights[l][i];
    for (std::size_t i = 0; i < biases_[l].size(); ++i) biases_[l][i] -= lr * grads.biases[l][i];
  }
}

std::string QNetwork::save_text() const {
  std::string out = "hynoma-qnet v1\n";
  out += "layers";
  for (int s : sizes_) out += " " + std::to_string(s);
  out += "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "dropout %.17g\n", dropout_);
  out += buf;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out += "layer " + std::to_string(l) + "\n";
    for (double v : weights_[l]) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      out += buf;
    }
    for (double v : biases_[l]) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", v);
      out += buf;
    }
  }
  return out;
}

QNetwork QNetwork::load_text(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "hynoma-qnet" || version != "v1")
    throw std::runtime_error("checkpoint: bad header");
  std::string word;
  in >> word;
  if (word != "layers") throw std::runtime_error("checkpoint: missing layers");
  QNetwork net;
  std::string rest;
  std::getline(in, rest);
  {
    std::istringstream ls(rest);
    int s;
    while (ls >> s) net.sizes_.push_back(s);
  }
  if (net.sizes_.size() < 2) throw std::runtime_error("checkpoint: bad layer sizes");
  in >> word >> net.dropout_;
  if (word != "dropout") throw std::runtime_error("checkpoint: missing dropout");
  const int layers = static_cast<int>(net.sizes_.size()) - 1;
  net.weights_.resize(layers);
  net.biases_.resize(layers);
  for (int l = 0; l < layers; ++l) {
    int idx;
    in >> word >> idx;
    if (word != "layer" || idx != l) throw std::runtime_error("checkpoint: layer marker");
    const std::size_t wn = static_cast<std::size_t>(net.sizes_[l]) * net.sizes_[l + 1];
    net.weights_[l].resize(wn);
    net.biases_[l].resize(net.sizes_[l + 1]);
    for (auto& v : net.weights_[l])
      if (!(in >> v)) throw std::runtime_error("checkpoint: truncated weights");
    for (auto& v : net.biases_[l])
      if (!(in >> v)) throw std::runtime_error("checkpoint: truncated biases");
  }
  return net;
}

bool QNetwork::params_equal(const QNetwork& other) const {
  return sizes_ == other.sizes_ && weights_ == other.weights_ && biases_ == other.biases_;
}

int argmax_action(const std::vector<double>& q) {
  int best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = static_cast<int>(i);
  return best;
}

int select_action(const QNetwork& net, const std::vector<double>& state, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0, 1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    return static_cast<int>(rng.uniform_int(net.output_dim()));
  return argmax_action(net.forward(state));
}

} // namespace hynoma::dqn
