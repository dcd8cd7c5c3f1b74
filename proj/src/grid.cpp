#include "nlslab/grid.hpp"

#include <cmath>

#include "nlslab/errors.hpp"

namespace nlslab {

namespace {
void check_axis(int n) {
  if (n < 64 || (n & (n - 1)) != 0)
    fail(Status::invalid_argument,
         "grid size must be a power of two >= 64, got " + std::to_string(n));
}
}  // namespace

Grid Grid::line(int n, double box_length, double origin) {
  check_axis(n);
  if (box_length <= 0) fail(Status::invalid_argument, "box_length must be positive");
  Grid g;
  g.d = 1;
  g.n = {n, 1};
  g.box = {box_length, 0.0};
  g.origin = {origin, 0.0};
  return g;
}

Grid Grid::square(int n, double box_length, double origin) {
  check_axis(n);
  if (box_length <= 0) fail(Status::invalid_argument, "box_length must be positive");
  Grid g;
  g.d = 2;
  g.n = {n, n};
  g.box = {box_length, box_length};
  g.origin = {origin, origin};
  return g;
}

double Grid::wavenumber(int axis, int j) const {
  const int m = n[axis];
  const double dk = 2.0 * M_PI / box[axis];
  return dk * (j <= m / 2 ? j : j - m);
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid))
    fail(Status::shape_mismatch, "fields live on different grids");
}

}  // namespace nlslab
