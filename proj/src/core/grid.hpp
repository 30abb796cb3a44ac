#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace regstop {

/// Sample layout of a uniform grid on [0,1] with n subintervals.
/// Nodal grids carry n+1 samples at s_i = i/n including both endpoints.
/// Periodic grids carry n samples at s_i = i/n; the value at s = 1 is
/// identified with the one at s = 0 and quadrature is the rectangle rule,
/// which coincides with the trapezoidal rule for 1-periodic functions.
enum class Layout { nodal, periodic };

/// Which inner product a grid function is meant to be measured in.
enum class Space { l2, h1 };

struct Grid {
  int n = 0;
  Layout layout = Layout::nodal;

  double h() const { return 1.0 / n; }
  int sample_count() const { return layout == Layout::nodal ? n + 1 : n; }
  double point(int i) const { return i * h(); }

  bool operator==(const Grid& o) const { return n == o.n && layout == o.layout; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// Makes a valid grid or throws; n must allow at least one interior node.
Grid make_grid(int n, Layout layout);

/// A function sampled on a grid, tagged with the space its norm lives in.
/// Values are plain samples; nodal functions in h1 are read as their
/// piecewise-linear interpolants when differentiated.
struct GridFunction {
  Grid grid;
  Space space = Space::l2;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
};

GridFunction make_function(const Grid& grid, Space space, double fill = 0.0);

/// Samples f(s) at the grid points.
template <class F>
GridFunction sample(const Grid& grid, Space space, F&& f) {
  GridFunction g = make_function(grid, space);
  for (int i = 0; i < g.size(); ++i) g.values[i] = f(grid.point(i));
  return g;
}

bool all_finite(const std::vector<double>& v);

/// y += a*x, elementwise; grids and spaces must already agree.
void axpy(double a, const GridFunction& x, GridFunction& y);

/// x - y as a new function.
GridFunction subtract(const GridFunction& x, const GridFunction& y);

void require_same_grid(const GridFunction& u, const GridFunction& v,
                       const char* where);

/// count geometrically spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace regstop
