#pragma once

#include <cstdint>
#include <vector>

namespace hynoma { class Rng; }

namespace hynoma::dqn {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Array-backed binary sum tree over leaf priorities. Descent and updates are
// O(log capacity).
class SumTree {
public:
  explicit SumTree(int capacity);

  int capacity() const { return capacity_; }
  double total() const { return nodes_[1]; }
  double leaf(int index) const;
  void update(int index, double priority);

  // leaf whose cumulative interval contains mass in [0, total())
  int find(double mass) const;

  // exact recomputation from the leaves, for consistency checks
  double recompute_total() const;

private:
  int capacity_;
  int leaf_base_; // power-of-two leaf count
  std::vector<double> nodes_;
};

struct SampledBatch {
  std::vector<int> indices; // buffer slots
  std::vector<Transition> transitions;
  std::vector<double> is_weights; // normalized by the batch max
  std::vector<double> probabilities;
};

// Prioritized ring buffer: p_i = (|priority| + epsilon)^alpha, stratified
// proportional sampling, importance weights (N * P(i))^-beta.
class ReplayBuffer {
public:
  ReplayBuffer(int capacity, double alpha, double epsilon);

  int size() const { return size_; }
  int capacity() const { return capacity_; }

  // new transitions enter at the running maximum priority
  void add(Transition t);

  SampledBatch sample(int k, double beta, Rng& rng) const;

  // |td_error| -> priority via the (x + eps)^alpha map
  void update_priority(int index, double td_error_abs);

  const SumTree& tree() const { return tree_; }
  const Transition& at(int index) const { return storage_[index]; }

private:
  double shaped(double raw) const;

  int capacity_;
  double alpha_;
  double epsilon_;
  std::vector<Transition> storage_;
  SumTree tree_;
  int write_pos_ = 0;
  int size_ = 0;
  double max_raw_priority_ = 1.0;
};

} // namespace hynoma::dqn
