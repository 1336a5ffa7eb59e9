#pragma once

#include <string>
#include <vector>

namespace hynoma { class Rng; }

namespace hynoma::dqn {

// Fully connected value network: affine + ReLU hidden layers, affine output.
// Dropout (inverted scaling) applies to hidden activations in training mode
// only; inference is deterministic.
class QNetwork {
public:
  QNetwork() = default;
  // sizes = [d_in, h1, ..., d_out]
  QNetwork(const std::vector<int>& sizes, double dropout, Rng& rng);

  int input_dim() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_dim() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  double dropout() const { return dropout_; }

  // deterministic inference
  std::vector<double> forward(const std::vector<double>& state) const;

  struct Gradients {
    std::vector<std::vector<double>> weights; // per layer, row-major [out x in]
    std::vector<std::vector<double>> biases;
    void scale(double s);
    double max_abs() const;
  };
  Gradients zero_gradients() const;

  // Huber loss on the TD errors of the taken actions, importance-weighted:
  //   L = (1/B) sum_i w_i * huber_delta(Q(s_i, a_i) - y_i)
  // Training-mode forward (dropout drawn from rng when train_rng != nullptr).
  // Returns the loss; per-sample TD errors are written to td_out when given.
  double loss_and_gradients(const std::vector<std::vector<double>>& states,
                            const std::vector<int>& actions, const std::vector<double>& targets,
                            const std::vector<double>& is_weights, double huber_delta,
                            Gradients& grads, Rng* train_rng,
                            std::vector<double>* td_out = nullptr) const;

  void sgd_step(const Gradients& grads, double lr);

  // versioned plain-text dump; round-trips losslessly (%.17g)
  std::string save_text() const;
  static QNetwork load_text(const std::string& text);

  bool params_equal(const QNetwork& other) const;

  // direct parameter access (tests, checkpoint tools)
  std::vector<std::vector<double>>& weights() { return weights_; }
  std::vector<std::vector<double>>& biases() { return biases_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

private:
  std::vector<int> sizes_;
  double dropout_ = 0.0;
  std::vector<std::vector<double>> weights_; // [layer][out * in]
  std::vector<std::vector<double>> biases_;  // [layer][out]
};

// epsilon-greedy over the network's Q values; argmax ties break to the
// lowest action index.
int select_action(const QNetwork& net, const std::vector<double>& state, double epsilon, Rng& rng);
int argmax_action(const std::vector<double>& q);

} // namespace hynoma::dqn
