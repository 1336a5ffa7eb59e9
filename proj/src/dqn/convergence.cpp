#include "dqn/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hynoma::dqn {

ConvergencePhases detect_convergence(const std::vector<double>& rewards,
                                     const ConvergenceParams& params) {
  const int n = static_cast<int>(rewards.size());
  const int w = params.window;
  if (w < 1) throw std::invalid_argument("convergence window must be >= 1");
  if (n < 2 * w) throw std::invalid_argument("need at least 2x window episodes of history");

  ConvergencePhases out;

  // trailing moving average, defined from episode w (1-based) onward
  const int m = n - w + 1;
  out.moving_average.resize(m);
  double acc = 0.0;
  for (int i = 0; i < w; ++i) acc += rewards[i];
  out.moving_average[0] = acc / w;
  for (int i = 1; i < m; ++i) {
    acc += rewards[i + w - 1] - rewards[i - 1];
    out.moving_average[i] = acc / w;
  }

  const auto& ma = out.moving_average;
  const double ma_min = *std::min_element(ma.begin(), ma.end());
  const double ma_max = *std::max_element(ma.begin(), ma.end());
  const double range = ma_max - ma_min;
  const double plateau = ma.back();
  const double tiny = 1e-12 * std::max(1.0, std::abs(plateau));
  const double delta = params.plateau_frac * range + tiny;
  const double theta = delta / w; // per-episode slope allowance

  // exploration ends at the first 20%-of-range progress above the MA minimum
  out.exploration_end = w;
  for (int i = 0; i < m; ++i) {
    if (ma[i] >= ma_min + 0.2 * range - tiny) {
      out.exploration_end = w + i;
      break;
    }
  }

  auto slope_ok = [&](int i) {
    if (i == 0) return true;
    const int back = std::max(0, i - w);
    const double s = (ma[i] - ma[back]) / static_cast<double>(i - back);
    return std::abs(s) <= theta;
  };

  // first index from which both conditions hold through the end
  int start = m; // m means "never"
  for (int i = m - 1; i >= 0; --i) {
    if (std::abs(ma[i] - plateau) <= delta && slope_ok(i))
      start = i;
    else
      break;
  }
  const int run = m - start;
  const int needed = std::max(w, static_cast<int>(std::ceil(params.tail_frac * m)));
  if (start < m && run >= needed) {
    out.converged = true;
    out.convergence_episode = w + start;
    out.exploration_end = std::min(out.exploration_end, out.convergence_episode);
  }
  return out;
}

} // namespace hynoma::dqn
