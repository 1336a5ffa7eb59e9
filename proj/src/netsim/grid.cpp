#include "netsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hynoma::net {

CellGrid build_grid(int rings, double isd_m) {
  if (rings < 1 || rings > 2) throw std::invalid_argument("grid rings must be 1 or 2");
  if (isd_m <= 0.0) throw std::invalid_argument("inter-site distance must be positive");

  CellGrid grid;
  grid.isd_m = isd_m;
  grid.rings = rings;

  // axial hex coordinates (q, r) with |q|, |r|, |q + r| <= rings
  int id = 0;
  for (int q = -rings; q <= rings; ++q) {
    for (int r = std::max(-rings, -q - rings); r <= std::min(rings, -q + rings); ++r) {
      Cell c;
      c.id = id++;
      c.x = isd_m * (static_cast<double>(q) + static_cast<double>(r) / 2.0);
      c.y = isd_m * (std::sqrt(3.0) / 2.0) * static_cast<double>(r);
      grid.cells.push_back(c);
    }
  }
  return grid;
}

Rect CellGrid::bounds() const {
  Rect r;
  r.min_x = r.min_y = std::numeric_limits<double>::max();
  r.max_x = r.max_y = std::numeric_limits<double>::lowest();
  for (const auto& c : cells) {
    r.min_x = std::min(r.min_x, c.x);
    r.min_y = std::min(r.min_y, c.y);
    r.max_x = std::max(r.max_x, c.x);
    r.max_y = std::max(r.max_y, c.y);
  }
  const double pad = isd_m / 2.0;
  r.min_x -= pad;
  r.min_y -= pad;
  r.max_x += pad;
  r.max_y += pad;
  return r;
}

int CellGrid::nearest_cell(double x, double y) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (const auto& c : cells) {
    const double d = distance(c, x, y);
    if (d < best_d) {
      best_d = d;
      best = c.id;
    }
  }
  return best;
}

double distance(const Cell& c, double x, double y) {
  const double dx = c.x - x, dy = c.y - y;
  return std::sqrt(dx * dx + dy * dy);
}

} // namespace hynoma::net
