#include <cmath>

#include "core/problems.hpp"
#include "core/tridiag.hpp"

namespace regstop {

namespace {

constexpr double kLowerBound = 0.1;

/// Stiffness matrix of -(a u')' on the interior nodes, with the coefficient
/// averaged onto cell midpoints: a_{e} = (a_e + a_{e+1})/2.
Tridiag assemble_stiffness(const Grid& grid, const std::vector<double>& a) {
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> am(static_cast<size_t>(n));
  for (int e = 0; e < n; ++e)
    am[static_cast<size_t>(e)] = 0.5 * (a[static_cast<size_t>(e)] + a[static_cast<size_t>(e + 1)]);
  Tridiag k;
  k.diag.resize(static_cast<size_t>(n - 1));
  k.off.resize(static_cast<size_t>(n - 2));
  for (int i = 1; i < n; ++i) {
    k.diag[static_cast<size_t>(i - 1)] = (am[static_cast<size_t>(i - 1)] + am[static_cast<size_t>(i)]) / h;
    if (i < n - 1) k.off[static_cast<size_t>(i - 1)] = -am[static_cast<size_t>(i)] / h;
  }
  return k;
}

/// Consistent-mass load on the interior nodes.
std::vector<double> assemble_load(const Grid& grid, const std::vector<double>& f) {
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> rhs(static_cast<size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    rhs[static_cast<size_t>(i - 1)] = h / 6.0 * f[static_cast<size_t>(i - 1)] +
                                      2.0 * h / 3.0 * f[static_cast<size_t>(i)] +
                                      h / 6.0 * f[static_cast<size_t>(i + 1)];
  }
  return rhs;
}

/// K(d) u on the interior nodes, the derivative of the stiffness action in
/// the coefficient; bilinear in (d, u).
std::vector<double> stiffness_times(const Grid& grid, const std::vector<double>& d,
                                    const std::vector<double>& u_full) {
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> out(static_cast<size_t>(n - 1), 0.0);
  for (int e = 0; e < n; ++e) {
    const double dm = 0.5 * (d[static_cast<size_t>(e)] + d[static_cast<size_t>(e + 1)]);
    const double du = (u_full[static_cast<size_t>(e)] - u_full[static_cast<size_t>(e + 1)]) / h;
    // element e couples nodes e and e+1; skip boundary rows
    if (e >= 1) out[static_cast<size_t>(e - 1)] += dm * du;
    if (e + 1 <= n - 1) out[static_cast<size_t>(e)] -= dm * du;
  }
  return out;
}

class Diffusion1dProblem final : public Problem {
 public:
  Diffusion1dProblem(int n, int fine_factor)
      : name_("diffusion1d"),
        fine_factor_(fine_factor),
        x_ip_(InnerProduct::h1(make_grid(n, Layout::nodal))),
        y_ip_(InnerProduct::l2(make_grid(n, Layout::nodal))) {
    if (fine_factor < 1) throw std::invalid_argument("diffusion1d: fine_factor must be >= 1");
    bench_.x_dagger = sample(x_ip_.grid(), Space::h1, exact_coefficient);
    bench_.x0 = make_function(x_ip_.grid(), Space::h1, 2.1);
    bench_.tau = 1.1;
    bench_.delta_rel_list = log_spaced(1e-3, 1e-2, 8);
    bench_.kmax = 20000;
    // the functionals keep rising out of their spurious start until a few
    // hundred iterations in, so the search window begins well past it
    bench_.k_min_search = 500;
  }

  const std::string& name() const override { return name_; }
  const InnerProduct& domain() const override { return x_ip_; }
  const InnerProduct& range() const override { return y_ip_; }

  GridFunction apply(const GridFunction& a) const override {
    require_domain_point(a);
    GridFunction u = make_function(y_ip_.grid(), Space::l2);
    u.values = diffusion_solve(a.grid, a.values, unit_load(a.grid));
    return u;
  }

  GridFunction deriv(const GridFunction& a, const GridFunction& d) const override {
    require_domain_point(a);
    require_same_grid(a, d, "diffusion1d deriv");
    const Grid& grid = a.grid;
    const TridiagFactor ka(assemble_stiffness(grid, a.values));
    const std::vector<double> u = solve_interior(ka, grid);
    std::vector<double> rhs = stiffness_times(grid, d.values, pad(u, grid));
    for (double& v : rhs) v = -v;
    GridFunction w = make_function(y_ip_.grid(), Space::l2);
    unpad(ka.solve(rhs), w.values);
    return w;
  }

  GridFunction adjoint(const GridFunction& a, const GridFunction& r) const override {
    require_domain_point(a);
    require_range_point(r);
    const Grid& grid = a.grid;
    const TridiagFactor ka(assemble_stiffness(grid, a.values));
    const std::vector<double> u_full = pad(solve_interior(ka, grid), grid);

    // weighted residual, interior rows only: the derivative vanishes on the
    // boundary nodes so they never enter the pairing
    const std::vector<double>& w = y_ip_.quad_weights();
    std::vector<double> rhs(static_cast<size_t>(grid.n - 1));
    for (int i = 1; i < grid.n; ++i)
      rhs[static_cast<size_t>(i - 1)] = w[static_cast<size_t>(i)] * r.values[static_cast<size_t>(i)];
    const std::vector<double> z_full = pad(ka.solve(rhs), grid);

    // t = -C^T z assembled by elements: C d = K(d) u, so each element
    // contributes (u_j - u_{j+1})(z_j - z_{j+1})/h split onto its two nodes
    const double h = grid.h();
    std::vector<double> t(a.values.size(), 0.0);
    for (int e = 0; e < grid.n; ++e) {
      const double val = (u_full[static_cast<size_t>(e)] - u_full[static_cast<size_t>(e + 1)]) *
                         (z_full[static_cast<size_t>(e)] - z_full[static_cast<size_t>(e + 1)]) / h;
      t[static_cast<size_t>(e)] -= 0.5 * val;
      t[static_cast<size_t>(e + 1)] -= 0.5 * val;
    }
    return x_ip_.riesz_from_functional(t);
  }

  DomainCheck domain_check(const GridFunction& a) const override {
    if (a.grid != x_ip_.grid()) return {false, "grid mismatch"};
    if (!all_finite(a.values)) return {false, "non-finite values"};
    for (int i = 0; i < a.size(); ++i) {
      if (a.values[static_cast<size_t>(i)] < kLowerBound) {
        return {false, "coefficient " + std::to_string(a.values[static_cast<size_t>(i)]) + " at s=" +
                           std::to_string(a.grid.point(i)) + " below ellipticity bound " +
                           std::to_string(kLowerBound)};
      }
    }
    return {true, ""};
  }

  const BenchmarkSetup& benchmark() const override { return bench_; }

  /// Data comes from a fine-grid solve with the analytic coefficient and is
  /// restricted back to the inversion grid, so the benchmark never inverts
  /// the very discretization that produced its data.
  GridFunction synthesize_data() const override {
    const Grid fine = make_grid(x_ip_.grid().n * fine_factor_, Layout::nodal);
    std::vector<double> a_fine(static_cast<size_t>(fine.sample_count()));
    for (int i = 0; i < fine.sample_count(); ++i)
      a_fine[static_cast<size_t>(i)] = exact_coefficient(fine.point(i));
    const std::vector<double> u_fine = diffusion_solve(fine, a_fine, unit_load(fine));
    GridFunction y = make_function(y_ip_.grid(), Space::l2);
    for (int i = 0; i < y.size(); ++i)
      y.values[static_cast<size_t>(i)] = u_fine[static_cast<size_t>(i * fine_factor_)];
    return y;
  }

 private:
  static double exact_coefficient(double s) { return 2.0 + s * (1.0 - s); }

  static std::vector<double> unit_load(const Grid& grid) {
    return std::vector<double>(static_cast<size_t>(grid.sample_count()), 1.0);
  }

  static std::vector<double> solve_interior(const TridiagFactor& ka, const Grid& grid) {
    return ka.solve(assemble_load(grid, unit_load(grid)));
  }

  static std::vector<double> pad(const std::vector<double>& interior, const Grid& grid) {
    std::vector<double> full(static_cast<size_t>(grid.sample_count()), 0.0);
    for (size_t i = 0; i < interior.size(); ++i) full[i + 1] = interior[i];
    return full;
  }

  static void unpad(const std::vector<double>& interior, std::vector<double>& full) {
    std::fill(full.begin(), full.end(), 0.0);
    for (size_t i = 0; i < interior.size(); ++i) full[i + 1] = interior[i];
  }

  std::string name_;
  int fine_factor_;
  InnerProduct x_ip_;
  InnerProduct y_ip_;
  BenchmarkSetup bench_;
};

}  // namespace

std::vector<double> diffusion_solve(const Grid& grid, const std::vector<double>& a,
                                    const std::vector<double>& f) {
  if (grid.layout != Layout::nodal) throw std::invalid_argument("diffusion_solve: nodal grid required");
  if (static_cast<int>(a.size()) != grid.sample_count() ||
      static_cast<int>(f.size()) != grid.sample_count())
    throw std::invalid_argument("diffusion_solve: size mismatch");
  const TridiagFactor ka(assemble_stiffness(grid, a));
  const std::vector<double> u = ka.solve(assemble_load(grid, f));
  std::vector<double> full(static_cast<size_t>(grid.sample_count()), 0.0);
  for (size_t i = 0; i < u.size(); ++i) full[i + 1] = u[i];
  return full;
}

ProblemPtr make_diffusion1d(int n, int fine_factor) {
  return std::make_shared<Diffusion1dProblem>(n, fine_factor);
}

}  // namespace regstop
