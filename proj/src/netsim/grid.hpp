#pragma once

#include <vector>

namespace hynoma::net {

struct Cell {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Hexagonal lattice of base stations: 7 cells for one ring, 19 for two.
struct CellGrid {
  std::vector<Cell> cells;
  double isd_m = 500.0;
  int rings = 1;

  int size() const { return static_cast<int>(cells.size()); }
  Rect bounds() const; // cell centers padded by isd/2, the mobility area
  int nearest_cell(double x, double y) const;
};

CellGrid build_grid(int rings, double isd_m);

double distance(const Cell& c, double x, double y);

} // namespace hynoma::net
