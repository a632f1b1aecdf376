#pragma once

#include "visclim/types.hpp"

/// Uniform box grids in 1 or 2 dimensions and cell-average fields on them.
namespace visclim {

enum class Boundary { outflow, periodic };

/// Uniform grid on [-half_width, half_width]^N with cells_per_axis cells per
/// axis. Cell values are stored flattened, x fastest (idx = ix + nx*iy).
struct GridSpec {
  int dimension = 1;
  Real half_width = 1.0;
  int cells_per_axis = 8;
  Boundary boundary = Boundary::outflow;

  Real dx() const { return 2.0 * half_width / cells_per_axis; }
  Real cell_volume() const { return dimension == 1 ? dx() : dx() * dx(); }
  long total_cells() const {
    return dimension == 1 ? cells_per_axis : long(cells_per_axis) * cells_per_axis;
  }
  /// Center coordinate of cell i along one axis.
  Real axis_center(long i) const { return -half_width + (i + 0.5) * dx(); }
  Point cell_center(long idx) const {
    if (dimension == 1) return Point(axis_center(idx), 0.0);
    const long nx = cells_per_axis;
    return Point(axis_center(idx % nx), axis_center(idx / nx));
  }

  void validate() const;
  bool operator==(const GridSpec& o) const {
    return dimension == o.dimension && half_width == o.half_width &&
           cells_per_axis == o.cells_per_axis && boundary == o.boundary;
  }
};

/// Cell-average field at a fixed time.
struct GridFunction {
  GridSpec grid;
  Real time = 0.0;
  Array values;

  static GridFunction sample(const GridSpec& grid, const std::function<Real(const Point&)>& fn,
                             Real time = 0.0);

  Real l1() const;
  Real l2() const;
  Real linf() const;
  /// Discrete total variation along one axis: sum of |jumps| across interior
  /// interfaces (plus the wrap interface on periodic grids), scaled by the
  /// transverse cell size in 2D.
  Real tv(int axis) const;

  /// L^p norm restricted to cells with centers inside [lo,hi] (per axis).
  Real lp_on_window(Real p, const Point& lo, const Point& hi) const;
};

/// L1 distance between two fields on the same grid.
Real l1_distance(const GridFunction& a, const GridFunction& b);

/// Conservative restriction of a fine field onto a coarser grid whose cell
/// count divides the fine one (cell averaging).
GridFunction restrict_to(const GridFunction& fine, const GridSpec& coarse);

}  // namespace visclim
