#include <cmath>

#include "core/problems.hpp"

namespace regstop {

namespace {

constexpr double kLowerBound = 1e-3;

/// Cumulative trapezoidal quadrature: out_0 = 0, out_i = int_0^{s_i} c.
std::vector<double> cumtrapz(double h, const std::vector<double>& c) {
  std::vector<double> out(c.size(), 0.0);
  for (size_t i = 1; i < c.size(); ++i)
    out[i] = out[i - 1] + 0.5 * h * (c[i - 1] + c[i]);
  return out;
}

/// Transpose action of the cumulative trapezoid matrix Q. Row i >= 1 of Q
/// holds (h/2, h, ..., h, h/2) up to column i and row 0 is zero, so the
/// transpose collapses to suffix sums.
std::vector<double> cumtrapz_transpose(double h, const std::vector<double>& v) {
  const size_t m = v.size();
  std::vector<double> suffix(m + 1, 0.0);
  for (size_t i = m; i > 0; --i) suffix[i - 1] = suffix[i] + v[i - 1];
  std::vector<double> out(m, 0.0);
  out[0] = 0.5 * h * suffix[1];
  for (size_t j = 1; j < m; ++j) out[j] = 0.5 * h * v[j] + h * suffix[j + 1];
  return out;
}

class HammersteinProblem final : public Problem {
 public:
  explicit HammersteinProblem(int n)
      : name_("hammerstein"),
        x_ip_(InnerProduct::h1(make_grid(n, Layout::nodal))),
        y_ip_(InnerProduct::l2(make_grid(n, Layout::nodal))) {
    bench_.x_dagger = sample(x_ip_.grid(), Space::h1,
                             [](double s) { return 2.0 + (s - 0.5) / 10.0; });
    bench_.x0 = make_function(x_ip_.grid(), Space::h1, 1.0);
    bench_.tau = 2.0;
    bench_.delta_rel_list = log_spaced(1e-3, 2e-2, 8);
    // sized so the semiconvergence minimum is interior even at the
    // smallest shipped noise level
    bench_.kmax = 60000;
  }

  const std::string& name() const override { return name_; }
  const InnerProduct& domain() const override { return x_ip_; }
  const InnerProduct& range() const override { return y_ip_; }

  GridFunction apply(const GridFunction& x) const override {
    require_inside(x);
    std::vector<double> cubes(x.values.size());
    for (size_t i = 0; i < cubes.size(); ++i) cubes[i] = x.values[i] * x.values[i] * x.values[i];
    GridFunction y = make_function(y_ip_.grid(), Space::l2);
    y.values = cumtrapz(x.grid.h(), cubes);
    return y;
  }

  GridFunction deriv(const GridFunction& x, const GridFunction& h) const override {
    require_inside(x);
    require_same_grid(x, h, "hammerstein deriv");
    std::vector<double> c(x.values.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = 3.0 * x.values[i] * x.values[i] * h.values[i];
    GridFunction y = make_function(y_ip_.grid(), Space::l2);
    y.values = cumtrapz(x.grid.h(), c);
    return y;
  }

  GridFunction adjoint(const GridFunction& x, const GridFunction& r) const override {
    require_inside(x);
    require_range_point(r);
    const std::vector<double>& w = y_ip_.quad_weights();
    std::vector<double> v(r.values.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = w[i] * r.values[i];
    std::vector<double> t = cumtrapz_transpose(x.grid.h(), v);
    for (size_t i = 0; i < t.size(); ++i) t[i] *= 3.0 * x.values[i] * x.values[i];
    return x_ip_.riesz_from_functional(t);
  }

  DomainCheck domain_check(const GridFunction& x) const override {
    if (x.grid != x_ip_.grid()) return {false, "grid mismatch"};
    if (!all_finite(x.values)) return {false, "non-finite values"};
    for (int i = 0; i < x.size(); ++i) {
      if (x.values[static_cast<size_t>(i)] < kLowerBound) {
        return {false, "value " + std::to_string(x.values[static_cast<size_t>(i)]) + " at s=" +
                           std::to_string(x.grid.point(i)) + " below lower bound " +
                           std::to_string(kLowerBound)};
      }
    }
    return {true, ""};
  }

  const BenchmarkSetup& benchmark() const override { return bench_; }

 private:
  void require_inside(const GridFunction& x) const {
    require_domain_point(x);
    const DomainCheck dc = domain_check(x);
    if (!dc.inside) throw std::domain_error("hammerstein: " + dc.reason);
  }

  std::string name_;
  InnerProduct x_ip_;
  InnerProduct y_ip_;
  BenchmarkSetup bench_;
};

}  // namespace

ProblemPtr make_hammerstein(int n) { return std::make_shared<HammersteinProblem>(n); }

}  // namespace regstop
