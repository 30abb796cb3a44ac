#include "core/grid.hpp"

#include <cmath>

namespace regstop {

Grid make_grid(int n, Layout layout) {
  if (n < 2) throw std::invalid_argument("grid: n must be at least 2, got " + std::to_string(n));
  return Grid{n, layout};
}

GridFunction make_function(const Grid& grid, Space space, double fill) {
  GridFunction g;
  g.grid = grid;
  g.space = space;
  g.values.assign(static_cast<size_t>(grid.sample_count()), fill);
  return g;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void axpy(double a, const GridFunction& x, GridFunction& y) {
  require_same_grid(x, y, "axpy");
  for (int i = 0; i < y.size(); ++i) y.values[i] += a * x.values[i];
}

GridFunction subtract(const GridFunction& x, const GridFunction& y) {
  require_same_grid(x, y, "subtract");
  GridFunction d = x;
  for (int i = 0; i < d.size(); ++i) d.values[i] -= y.values[i];
  return d;
}

void require_same_grid(const GridFunction& u, const GridFunction& v, const char* where) {
  if (u.grid != v.grid)
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi > 0.0))
    throw std::invalid_argument("log_spaced: needs positive endpoints and count >= 1");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<size_t>(count));
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<size_t>(i)] = lo * std::exp(ratio * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace regstop
