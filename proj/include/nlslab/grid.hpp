#ifndef NLSLAB_GRID_HPP
#define NLSLAB_GRID_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

// Uniform periodic grid in d = 1 or 2 dimensions.  Sample counts are
// powers of two; coordinates run x_i = origin + i*h with h = box/n.
struct Grid {
  int d = 1;
  std::array<int, 2> n = {0, 1};
  std::array<double, 2> box = {0.0, 0.0};
  std::array<double, 2> origin = {0.0, 0.0};

  static Grid line(int n, double box_length, double origin);
  static Grid square(int n, double box_length, double origin);

  double h(int axis) const { return box[axis] / n[axis]; }
  double coord(int axis, int i) const { return origin[axis] + i * h(axis); }
  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * (d == 2 ? n[1] : 1);
  }
  double cell() const { return d == 2 ? h(0) * h(1) : h(0); }
  // Fourier wavenumber of mode index j along an axis.
  double wavenumber(int axis, int j) const;

  bool operator==(const Grid& o) const {
    return d == o.d && n == o.n && box == o.box && origin == o.origin;
  }
};

struct Field {
  Grid grid;
  std::vector<cplx> values;  // row-major, index = i0*n1 + i1
  double time = 0.0;

  Field() = default;
  explicit Field(const Grid& g, double t = 0.0)
      : grid(g), values(g.size(), cplx(0.0, 0.0)), time(t) {}

  cplx& at(int i0, int i1 = 0) { return values[idx(i0, i1)]; }
  const cplx& at(int i0, int i1 = 0) const { return values[idx(i0, i1)]; }
  std::size_t idx(int i0, int i1) const {
    return static_cast<std::size_t>(i0) * (grid.d == 2 ? grid.n[1] : 1) + i1;
  }
};

void require_same_grid(const Field& a, const Field& b);

}  // namespace nlslab

#endif
