#include "visclim/grid.hpp"

namespace visclim {

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("GridSpec: dimension must be 1 or 2");
  if (cells_per_axis < 8)
    throw std::invalid_argument("GridSpec: cells_per_axis must be >= 8");
  if (!(half_width > 0)) throw std::invalid_argument("GridSpec: half_width must be positive");
}

GridFunction GridFunction::sample(const GridSpec& grid,
                                  const std::function<Real(const Point&)>& fn, Real time) {
  grid.validate();
  GridFunction out;
  out.grid = grid;
  out.time = time;
  out.values = Array::Zero(grid.total_cells());
  for (long i = 0; i < grid.total_cells(); ++i) out.values[i] = fn(grid.cell_center(i));
  return out;
}

Real GridFunction::l1() const { return sum_abs(values) * grid.cell_volume(); }

Real GridFunction::l2() const { return std::sqrt(sum_sq(values) * grid.cell_volume()); }

Real GridFunction::linf() const { return max_abs(values); }

Real GridFunction::tv(int axis) const {
  const long n = grid.cells_per_axis;
  const Real transverse = grid.dimension == 1 ? 1.0 : grid.dx();
  Real acc = 0;
  if (grid.dimension == 1) {
    for (long i = 0; i + 1 < n; ++i) acc += std::abs(values[i + 1] - values[i]);
    if (grid.boundary == Boundary::periodic) acc += std::abs(values[0] - values[n - 1]);
    return acc;
  }
  const long stride = axis == 0 ? 1 : n;
  const long lines = n;
  for (long line = 0; line < lines; ++line) {
    const long base = axis == 0 ? line * n : line;
    for (long i = 0; i + 1 < n; ++i)
      acc += std::abs(values[base + (i + 1) * stride] - values[base + i * stride]);
    if (grid.boundary == Boundary::periodic)
      acc += std::abs(values[base] - values[base + (n - 1) * stride]);
  }
  return acc * transverse;
}

Real GridFunction::lp_on_window(Real p, const Point& lo, const Point& hi) const {
  Real acc = 0;
  for (long i = 0; i < grid.total_cells(); ++i) {
    const Point c = grid.cell_center(i);
    bool inside = c.x() >= lo.x() && c.x() <= hi.x();
    if (grid.dimension == 2) inside = inside && c.y() >= lo.y() && c.y() <= hi.y();
    if (inside) acc += std::pow(std::abs(values[i]), p);
  }
  return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

Real l1_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("l1_distance: grid mismatch");
  return sum_abs(a.values - b.values) * a.grid.cell_volume();
}

GridFunction restrict_to(const GridFunction& fine, const GridSpec& coarse) {
  if (fine.grid.dimension != coarse.dimension || fine.grid.half_width != coarse.half_width)
    throw std::invalid_argument("restrict_to: incompatible domains");
  if (fine.grid.cells_per_axis % coarse.cells_per_axis != 0)
    throw std::invalid_argument("restrict_to: cell counts must nest");
  const long r = fine.grid.cells_per_axis / coarse.cells_per_axis;
  GridFunction out;
  out.grid = coarse;
  out.time = fine.time;
  out.values = Array::Zero(coarse.total_cells());
  if (coarse.dimension == 1) {
    for (long i = 0; i < coarse.cells_per_axis; ++i) {
      Real acc = 0;
      for (long k = 0; k < r; ++k) acc += fine.values[i * r + k];
      out.values[i] = acc / r;
    }
    return out;
  }
  const long nxf = fine.grid.cells_per_axis, nxc = coarse.cells_per_axis;
  for (long j = 0; j < nxc; ++j)
    for (long i = 0; i < nxc; ++i) {
      Real acc = 0;
      for (long kj = 0; kj < r; ++kj)
        for (long ki = 0; ki < r; ++ki) acc += fine.values[(j * r + kj) * nxf + i * r + ki];
      out.values[j * nxc + i] = acc / (r * r);
    }
  return out;
}

}  // namespace visclim
