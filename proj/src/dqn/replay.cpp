#include "dqn/replay.hpp"

#include <cmath>
#include <stdexcept>

#include "common/rng.hpp"

namespace hynoma::dqn {

SumTree::SumTree(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("sum tree capacity must be positive");
  leaf_base_ = 1;
  while (leaf_base_ < capacity) leaf_base_ <<= 1;
  nodes_.assign(static_cast<std::size_t>(2) * leaf_base_, 0.0);
}

double SumTree::leaf(int index) const {
  if (index < 0 || index >= capacity_) throw std::out_of_range("sum tree leaf index");
  return nodes_[leaf_base_ + index];
}

void SumTree::update(int index, double priority) {
  if (index < 0 || index >= capacity_) throw std::out_of_range("sum tree leaf index");
  if (priority < 0.0 || !std::isfinite(priority))
    throw std::invalid_argument("sum tree priority must be finite and nonnegative");
  int node = leaf_base_ + index;
  nodes_[node] = priority;
  for (node >>= 1; node >= 1; node >>= 1)
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

int SumTree::find(double mass) const {
  if (total() <= 0.0) throw std::logic_error("sum tree is empty");
  if (mass < 0.0) mass = 0.0;
  int node = 1;
  while (node < leaf_base_) {
    const double left = nodes_[2 * node];
    if (mass < left) {
      node = 2 * node;
    } else {
      mass -= left;
      node = 2 * node + 1;
    }
  }
  int index = node - leaf_base_;
  // float drift at the right edge can land on a zero leaf past the end
  if (index >= capacity_) index = capacity_ - 1;
  while (index > 0 && nodes_[leaf_base_ + index] <= 0.0) --index;
  return index;
}

double SumTree::recompute_total() const {
  double sum = 0.0;
  for (int i = 0; i < capacity_; ++i) sum += nodes_[leaf_base_ + i];
  return sum;
}

ReplayBuffer::ReplayBuffer(int capacity, double alpha, double epsilon)
    : capacity_(capacity), alpha_(alpha), epsilon_(epsilon), tree_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("replay capacity must be positive");
  if (alpha < 0.0) throw std::invalid_argument("priority exponent must be nonnegative");
  if (epsilon <= 0.0) throw std::invalid_argument("priority floor must be positive");
  storage_.resize(capacity);
}

double ReplayBuffer::shaped(double raw) const {
  return std::pow(std::abs(raw) + epsilon_, alpha_);
}

void ReplayBuffer::add(Transition t) {
  storage_[write_pos_] = std::move(t);
  tree_.update(write_pos_, shaped(max_raw_priority_));
  write_pos_ = (write_pos_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

SampledBatch ReplayBuffer::sample(int k, double beta, Rng& rng) const {
  if (k <= 0) throw std::invalid_argument("batch size must be positive");
  if (size_ < k) throw std::invalid_argument("replay buffer underfull for the requested batch");

  SampledBatch batch;
  batch.indices.reserve(k);
  batch.transitions.reserve(k);
  batch.is_weights.reserve(k);
  batch.probabilities.reserve(k);

  const double total = tree_.total();
  const double segment = total / static_cast<double>(k);
  double max_w = 0.0;
  for (int i = 0; i < k; ++i) {
    const double mass = (static_cast<double>(i) + rng.uniform()) * segment;
    const int index = tree_.find(mass);
    const double p = tree_.leaf(index) / total;
    const double w = std::pow(static_cast<double>(size_) * p, -beta);
    batch.indices.push_back(index);
    batch.transitions.push_back(storage_[index]);
    batch.probabilities.push_back(p);
    batch.is_weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  if (max_w > 0.0)
    for (double& w : batch.is_weights) w /= max_w;
  return batch;
}

void ReplayBuffer::update_priority(int index, double td_error_abs) {
  if (index < 0 || index >= size_) throw std::out_of_range("replay priority index");
  max_raw_priority_ = std::max(max_raw_priority_, std::abs(td_error_abs));
  tree_.update(index, shaped(td_error_abs));
}

} // namespace hynoma::dqn
