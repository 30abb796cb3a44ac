#include <cmath>

#include "core/problems.hpp"

namespace regstop {

namespace {

/// Circular convolution with rectangle-rule weight: (a * b)_i =
/// (1/n) sum_j a_{(i-j) mod n} b_j. Direct evaluation; the grids here are
/// small enough that an FFT would only add machinery.
std::vector<double> circ_conv(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<double> out(a.size(), 0.0);
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      int k = i - j;
      if (k < 0) k += n;
      s += a[static_cast<size_t>(k)] * b[static_cast<size_t>(j)];
    }
    out[static_cast<size_t>(i)] = h * s;
  }
  return out;
}

std::vector<double> reflect(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  out[0] = x[0];
  for (int i = 1; i < n; ++i) out[static_cast<size_t>(i)] = x[static_cast<size_t>(n - i)];
  return out;
}

class AutoconvProblem final : public Problem {
 public:
  explicit AutoconvProblem(int n)
      : name_("autoconv"),
        x_ip_(InnerProduct::l2(make_grid(n, Layout::periodic))),
        y_ip_(InnerProduct::l2(make_grid(n, Layout::periodic))) {
    const double root2 = std::sqrt(2.0);
    const double two_pi = 6.283185307179586476925286766559;
    bench_.x_dagger = sample(x_ip_.grid(), Space::l2, [&](double s) {
      return 10.0 + root2 * std::sin(two_pi * s);
    });
    bench_.x0 = sample(x_ip_.grid(), Space::l2, [&](double s) {
      return 10.0 + 0.25 * root2 * std::sin(two_pi * s);
    });
    bench_.tau = 1.1;
    bench_.delta_rel_list = log_spaced(1e-4, 1e-3, 8);
    // the iteration contracts to a fixed point here, so the budget is set
    // just past the error minima of the shipped noise range; the window
    // start clears the long climb of every functional out of its start
    bench_.kmax = 1800;
    bench_.k_min_search = 600;
  }

  const std::string& name() const override { return name_; }
  const InnerProduct& domain() const override { return x_ip_; }
  const InnerProduct& range() const override { return y_ip_; }

  GridFunction apply(const GridFunction& x) const override {
    require_domain_point(x);
    GridFunction y = make_function(y_ip_.grid(), Space::l2);
    y.values = circ_conv(x.values, x.values);
    return y;
  }

  GridFunction deriv(const GridFunction& x, const GridFunction& h) const override {
    require_domain_point(x);
    require_same_grid(x, h, "autoconv deriv");
    GridFunction y = make_function(y_ip_.grid(), Space::l2);
    y.values = circ_conv(x.values, h.values);
    for (double& v : y.values) v *= 2.0;
    return y;
  }

  GridFunction adjoint(const GridFunction& x, const GridFunction& r) const override {
    require_domain_point(x);
    require_range_point(r);
    // L2 adjoint of h -> 2 x*h is r -> 2 x~*r with x~ the index reflection
    GridFunction out = make_function(x_ip_.grid(), Space::l2);
    out.values = circ_conv(reflect(x.values), r.values);
    for (double& v : out.values) v *= 2.0;
    return out;
  }

  DomainCheck domain_check(const GridFunction& x) const override {
    if (x.grid != x_ip_.grid()) return {false, "grid mismatch"};
    if (!all_finite(x.values)) return {false, "non-finite values"};
    return {true, ""};
  }

  const BenchmarkSetup& benchmark() const override { return bench_; }

 private:
  std::string name_;
  InnerProduct x_ip_;
  InnerProduct y_ip_;
  BenchmarkSetup bench_;
};

}  // namespace

ProblemPtr make_autoconv(int n) { return std::make_shared<AutoconvProblem>(n); }

}  // namespace regstop
