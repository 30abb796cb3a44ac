#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "core/grid.hpp"
#include "core/tridiag.hpp"

namespace regstop {

/// Inner product on a grid, either plain L2 quadrature or the H1 product
/// <u,v> = int u v + int u' v' of the piecewise-linear interpolants.
///
/// The L2 product is the composite trapezoidal rule on nodal grids and the
/// rectangle rule on periodic grids. The H1 product is realized by the
/// assembled mass-plus-stiffness Gram matrix; its factorization is built
/// once at construction and shared, all queries are const.
class InnerProduct {
 public:
  static InnerProduct l2(const Grid& grid);
  static InnerProduct h1(const Grid& grid);

  Space space() const { return space_; }
  const Grid& grid() const { return grid_; }

  double inner(const GridFunction& u, const GridFunction& v) const;
  double norm(const GridFunction& u) const;

  /// Quadrature weights of the L2 product on this grid (diagonal Gram).
  const std::vector<double>& quad_weights() const { return weights_; }

  /// Riesz map taking an L2 representative r to the w with
  /// <w, v>_H1 = <r, v>_L2 for every grid function v. H1 spaces only.
  GridFunction riesz_from_l2(const GridFunction& r) const;

  /// Riesz map taking raw functional coefficients t (so v -> t . v) to the
  /// w with <w, v>_H1 = t . v. This is the form operator adjoints need
  /// after transposing their derivative against the range weights.
  GridFunction riesz_from_functional(const std::vector<double>& t) const;

  /// Assembled H1 Gram matrix (mass + stiffness). H1 spaces only.
  const Tridiag& gram() const;

 private:
  InnerProduct(const Grid& grid, Space space);

  Grid grid_;
  Space space_;
  std::vector<double> weights_;
  std::shared_ptr<const Tridiag> gram_;
  std::shared_ptr<const TridiagFactor> factor_;
};

struct NoisyData {
  GridFunction y_delta;
  double delta_abs = 0.0;
};

/// Adds white Gaussian noise rescaled so that the L2 distance to y is
/// exactly delta_rel * ||y||_L2. The draw comes from the counter generator
/// at (seed, stream 0), so the same seed reproduces the same data.
NoisyData add_noise(const GridFunction& y, double delta_rel, uint64_t seed);

using LinearAction = std::function<GridFunction(const GridFunction&)>;

/// Largest singular value of a linear map via power iteration on
/// adjoint(deriv(.)), symmetric in the domain inner product. Returns 0 for
/// the zero map; restarts from a fresh random direction if an iterate
/// degenerates to zero.
double estimate_opnorm(const LinearAction& deriv_action,
                       const LinearAction& adjoint_action,
                       const InnerProduct& domain, int iters = 400,
                       double tol = 1e-12, uint64_t seed = 0x9a0c7e5d3b21f84full);

}  // namespace regstop
