#include "core/spaces.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace regstop {

namespace {

std::vector<double> l2_quad_weights(const Grid& grid) {
  const double h = grid.h();
  std::vector<double> w(static_cast<size_t>(grid.sample_count()), h);
  if (grid.layout == Layout::nodal) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

Tridiag assemble_h1_gram(const Grid& grid) {
  // mass + stiffness of piecewise-linear elements on the uniform grid
  const int m = grid.sample_count();
  const double h = grid.h();
  Tridiag g;
  g.diag.assign(static_cast<size_t>(m), 2.0 * h / 3.0 + 2.0 / h);
  g.off.assign(static_cast<size_t>(m - 1), h / 6.0 - 1.0 / h);
  g.diag.front() = h / 3.0 + 1.0 / h;
  g.diag.back() = h / 3.0 + 1.0 / h;
  return g;
}

void require_finite(const GridFunction& u, const char* where) {
  if (!all_finite(u.values))
    throw std::invalid_argument(std::string(where) + ": non-finite values");
}

}  // namespace

InnerProduct::InnerProduct(const Grid& grid, Space space)
    : grid_(grid), space_(space), weights_(l2_quad_weights(grid)) {
  if (space == Space::h1) {
    if (grid.layout != Layout::nodal)
      throw std::invalid_argument("h1 inner product requires a nodal grid");
    gram_ = std::make_shared<const Tridiag>(assemble_h1_gram(grid));
    factor_ = std::make_shared<const TridiagFactor>(*gram_);
  }
}

InnerProduct InnerProduct::l2(const Grid& grid) { return InnerProduct(grid, Space::l2); }

InnerProduct InnerProduct::h1(const Grid& grid) { return InnerProduct(grid, Space::h1); }

double InnerProduct::inner(const GridFunction& u, const GridFunction& v) const {
  if (u.grid != grid_ || v.grid != grid_)
    throw std::invalid_argument("inner: grid mismatch");
  if (u.space != space_ || v.space != space_)
    throw std::invalid_argument("inner: space tag mismatch");
  require_finite(u, "inner");
  require_finite(v, "inner");
  if (space_ == Space::l2) {
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += weights_[static_cast<size_t>(i)] * u.values[static_cast<size_t>(i)] * v.values[static_cast<size_t>(i)];
    return s;
  }
  const std::vector<double> gu = gram_->apply(u.values);
  double s = 0.0;
  for (int i = 0; i < u.size(); ++i) s += v.values[static_cast<size_t>(i)] * gu[static_cast<size_t>(i)];
  return s;
}

double InnerProduct::norm(const GridFunction& u) const {
  return std::sqrt(std::max(0.0, inner(u, u)));
}

GridFunction InnerProduct::riesz_from_l2(const GridFunction& r) const {
  if (space_ != Space::h1) throw std::logic_error("riesz_from_l2: not an h1 space");
  if (r.grid != grid_) throw std::invalid_argument("riesz_from_l2: grid mismatch");
  std::vector<double> rhs(r.values.size());
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = weights_[i] * r.values[i];
  return riesz_from_functional(rhs);
}

GridFunction InnerProduct::riesz_from_functional(const std::vector<double>& t) const {
  if (space_ != Space::h1) throw std::logic_error("riesz_from_functional: not an h1 space");
  if (static_cast<int>(t.size()) != grid_.sample_count())
    throw std::invalid_argument("riesz_from_functional: size mismatch");
  GridFunction w = make_function(grid_, Space::h1);
  w.values = factor_->solve(t);
  return w;
}

const Tridiag& InnerProduct::gram() const {
  if (space_ != Space::h1) throw std::logic_error("gram: not an h1 space");
  return *gram_;
}

NoisyData add_noise(const GridFunction& y, double delta_rel, uint64_t seed) {
  if (delta_rel < 0.0) throw std::invalid_argument("add_noise: negative delta_rel");
  const InnerProduct ip = InnerProduct::l2(y.grid);
  GridFunction yl2 = y;
  yl2.space = Space::l2;
  const double ynorm = ip.norm(yl2);
  NoisyData out{y, 0.0};
  if (delta_rel == 0.0) return out;
  if (ynorm == 0.0)
    throw std::invalid_argument("add_noise: zero data with positive delta_rel has no relative scale");

  const double target = delta_rel * ynorm;
  for (uint64_t stream = 0; stream < 8; ++stream) {
    GridFunction xi = make_function(y.grid, Space::l2);
    xi.values = gaussian_vector(seed, stream, xi.size());
    const double xin = ip.norm(xi);
    if (xin == 0.0) continue;  // measure-zero draw, take the next stream
    axpy(target / xin, xi, out.y_delta);
    out.delta_abs = target;
    return out;
  }
  throw std::runtime_error("add_noise: could not draw a nonzero direction");
}

double estimate_opnorm(const LinearAction& deriv_action, const LinearAction& adjoint_action,
                       const InnerProduct& domain, int iters, double tol, uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("estimate_opnorm: iters must be positive");
  for (uint64_t attempt = 0; attempt < 4; ++attempt) {
    GridFunction v = make_function(domain.grid(), domain.space());
    v.values = gaussian_vector(seed, attempt, v.size());
    double nv = domain.norm(v);
    if (nv == 0.0) continue;
    for (double& x : v.values) x /= nv;

    double lambda = 0.0;
    bool degenerate = false;
    for (int it = 0; it < iters; ++it) {
      GridFunction w = adjoint_action(deriv_action(v));
      const double lam_new = domain.inner(v, w);  // Rayleigh quotient, ||v|| = 1
      const double nw = domain.norm(w);
      if (nw == 0.0) {
        degenerate = true;  // landed in the null space, try a fresh direction
        break;
      }
      for (int i = 0; i < v.size(); ++i) v.values[static_cast<size_t>(i)] = w.values[static_cast<size_t>(i)] / nw;
      if (it > 0 && std::abs(lam_new - lambda) <= tol * std::max(std::abs(lam_new), 1e-300)) {
        lambda = lam_new;
        break;
      }
      lambda = lam_new;
    }
    if (!degenerate) return std::sqrt(std::max(0.0, lambda));
  }
  return 0.0;  // every attempt annihilated: the zero map
}

}  // namespace regstop
