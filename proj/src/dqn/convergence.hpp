#pragma once

#include <vector>

namespace hynoma::dqn {

struct ConvergenceParams {
  int window = 50;          // moving-average window (episodes)
  double plateau_frac = 0.10; // tolerance around the final plateau, fraction of the MA range
  double tail_frac = 0.20;    // the plateau run must cover this share of the MA series
};

struct ConvergencePhases {
  bool converged = false;
  int exploration_end = 0;   // first episode of the learning phase (1-based)
  int convergence_episode = 0; // first episode of the converged plateau (1-based)
  std::vector<double> moving_average;
};

// Splits a reward history into exploration / learning / convergence phases.
// The convergence episode is the start of the run where the moving average
// stays within the plateau tolerance of its final value and its slope stays
// inside the tolerance, through the end of the series, for at least
// max(window, tail_frac * series) episodes. Flat-from-the-start series
// converge at episode `window` (the first defined MA point); persistent
// trends report not converged.
ConvergencePhases detect_convergence(const std::vector<double>& episode_rewards,
                                     const ConvergenceParams& params = {});

} // namespace hynoma::dqn
