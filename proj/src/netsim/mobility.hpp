#pragma once

#include "netsim/grid.hpp"

namespace hynoma { class Rng; }

namespace hynoma::net {

// Random-waypoint walker. Speed is fixed for the lifetime of the state
// (per user per episode); only the waypoint is redrawn.
struct MobilityState {
  double x = 0.0, y = 0.0;
  double speed_kmh = 3.0;
  double waypoint_x = 0.0, waypoint_y = 0.0;
  bool has_waypoint = false;

  double speed_mps() const { return speed_kmh / 3.6; }
  // heading toward the current waypoint, radians
  double heading() const;
};

// Advances one step of dt seconds. At the waypoint (or without one) a new
// waypoint is drawn uniformly in bounds before moving.
void step_mobility(MobilityState& state, double dt_s, const Rect& bounds, Rng& rng);

} // namespace hynoma::net
