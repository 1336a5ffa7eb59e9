#include "netsim/mobility.hpp"

#include <cmath>
#include <stdexcept>

#include "common/rng.hpp"

namespace hynoma::net {

double MobilityState::heading() const {
  return std::atan2(waypoint_y - y, waypoint_x - x);
}

void step_mobility(MobilityState& state, double dt_s, const Rect& bounds, Rng& rng) {
  if (dt_s <= 0.0) throw std::invalid_argument("mobility dt must be positive");

  const double eps = 1e-9;
  double dx = state.waypoint_x - state.x;
  double dy = state.waypoint_y - state.y;
  if (!state.has_waypoint || (std::abs(dx) < eps && std::abs(dy) < eps)) {
    state.waypoint_x = rng.uniform(bounds.min_x, bounds.max_x);
    state.waypoint_y = rng.uniform(bounds.min_y, bounds.max_y);
    state.has_waypoint = true;
    dx = state.waypoint_x - state.x;
    dy = state.waypoint_y - state.y;
  }

  const double dist = std::sqrt(dx * dx + dy * dy);
  const double step = state.speed_mps() * dt_s;
  if (step >= dist) {
    // arrive; the next call draws a fresh waypoint
    state.x = state.waypoint_x;
    state.y = state.waypoint_y;
  } else {
    state.x += dx / dist * step;
    state.y += dy / dist * step;
  }
}

} // namespace hynoma::net
