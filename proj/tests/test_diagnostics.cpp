#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/problems.hpp"
#include "core/rng.hpp"
#include "core/spaces.hpp"
#include "support/reference.hpp"

using namespace regstop;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// sigma_i = 1/(i+1), i = 0..count-1, with uniform random coefficients.
SingularSystem power_decay_system(int count, uint64_t seed) {
  SingularSystem ss;
  const CounterRng rng(seed, 0);
  for (int i = 0; i < count; ++i) {
    ss.sigma.push_back(1.0 / static_cast<double>(i + 1));
    ss.noise_coeffs.push_back(0.1 + rng.uniform(static_cast<uint64_t>(2 * i)));
    ss.sol_coeffs.push_back(0.1 + rng.uniform(static_cast<uint64_t>(2 * i + 1)));
  }
  ss.t0 = ss.sigma.front() * ss.sigma.front();
  return ss;
}

/// Direct double-loop evaluation of the noise weight condition.
ScanResult muckenhoupt_oracle(const SingularSystem& ss, int p, const std::vector<double>& grid) {
  ScanResult best{-1.0, 0.0};
  for (double t : grid) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ss.sigma.size(); ++i) {
      const double s2 = ss.sigma[i] * ss.sigma[i];
      const double e2 = ss.noise_coeffs[i] * ss.noise_coeffs[i];
      if (s2 >= t)
        num += t * e2 / s2;
      else
        den += (p == 1 ? 1.0 : s2 / t) * e2;
    }
    const double ratio = den > 0.0 ? num / den : (num > 0.0 ? kInf : 0.0);
    if (ratio > best.constant) best = {ratio, t};
  }
  return best;
}

/// Direct double-loop evaluation of the solution regularity condition.
ScanResult regularity_oracle(const SingularSystem& ss, int p, FilterKind filter,
                             const std::vector<double>& grid) {
  ScanResult best{-1.0, 0.0};
  for (double t : grid) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ss.sigma.size(); ++i) {
      const double s2 = ss.sigma[i] * ss.sigma[i];
      const double x2 = ss.sol_coeffs[i] * ss.sol_coeffs[i];
      if (s2 <= t) {
        num += x2;
      } else {
        const double r = filter == FilterKind::tikhonov
                             ? t / (t + s2)
                             : std::pow(std::max(0.0, 1.0 - s2), 1.0 / t);
        den += (p == 1 ? 1.0 : s2 / t) * r * r * x2;
      }
    }
    const double ratio = den > 0.0 ? num / den : (num > 0.0 ? kInf : 0.0);
    if (ratio > best.constant) best = {ratio, t};
  }
  return best;
}

void check_scan_matches(const ScanResult& got, const ScanResult& want) {
  if (std::isinf(want.constant)) {
    CHECK(std::isinf(got.constant));
  } else {
    CHECK(got.constant == doctest::Approx(want.constant).epsilon(1e-12));
  }
  CHECK(got.worst_t == want.worst_t);
}

}  // namespace

TEST_CASE("scan grids are the squared spectrum minus the structurally empty endpoint") {
  const SingularSystem ss = power_decay_system(200, 5);
  const std::vector<double> mg = muckenhoupt_t_grid(ss);
  const std::vector<double> rg = regularity_t_grid(ss);
  REQUIRE(mg.size() == 199);
  REQUIRE(rg.size() == 199);
  CHECK(mg.front() == ss.sigma[0] * ss.sigma[0]);
  CHECK(mg.back() == ss.sigma[198] * ss.sigma[198]);  // smallest square dropped
  CHECK(rg.front() == ss.sigma[1] * ss.sigma[1]);     // largest square dropped
  CHECK(rg.back() == ss.sigma[199] * ss.sigma[199]);
}

TEST_CASE("noise weight condition matches the double loop on a power decay spectrum") {
  const SingularSystem ss = power_decay_system(200, 5);
  const std::vector<double> grid = muckenhoupt_t_grid(ss);
  for (int p : {1, 2}) {
    CAPTURE(p);
    check_scan_matches(muckenhoupt_constant(ss, p, grid), muckenhoupt_oracle(ss, p, grid));
  }
}

TEST_CASE("solution regularity condition matches the double loop for both filters") {
  const SingularSystem raw = power_decay_system(200, 6);
  const std::vector<double> grid = regularity_t_grid(raw);
  for (int p : {1, 2}) {
    CAPTURE(p);
    check_scan_matches(regularity_constant(raw, p, FilterKind::tikhonov, grid),
                       regularity_oracle(raw, p, FilterKind::tikhonov, grid));
  }

  const SingularSystem scaled = rescale_sigma(raw);
  const std::vector<double> sgrid = regularity_t_grid(scaled);
  for (int p : {1, 2}) {
    CAPTURE(p);
    check_scan_matches(regularity_constant(scaled, p, FilterKind::landweber, sgrid),
                       regularity_oracle(scaled, p, FilterKind::landweber, sgrid));
  }
}

TEST_CASE("degenerate coefficient layouts hit the documented conventions") {
  SingularSystem ss = power_decay_system(50, 7);

  // all noise in the best-resolved mode: every tail is empty, so the
  // condition is infinite (an error this smooth defeats the bound)
  std::fill(ss.noise_coeffs.begin(), ss.noise_coeffs.end(), 0.0);
  ss.noise_coeffs[0] = 1.0;
  CHECK(std::isinf(muckenhoupt_constant(ss, 1, muckenhoupt_t_grid(ss)).constant));

  // no noise at all: every ratio is 0/0, counted as zero
  ss.noise_coeffs[0] = 0.0;
  CHECK(muckenhoupt_constant(ss, 1, muckenhoupt_t_grid(ss)).constant == 0.0);

  // all solution mass in the worst-resolved mode: infinite regularity
  std::fill(ss.sol_coeffs.begin(), ss.sol_coeffs.end(), 0.0);
  ss.sol_coeffs.back() = 1.0;
  CHECK(std::isinf(regularity_constant(ss, 2, FilterKind::tikhonov, regularity_t_grid(ss)).constant));

  CHECK_THROWS_AS(muckenhoupt_constant(ss, 3, muckenhoupt_t_grid(ss)), std::invalid_argument);
  CHECK_THROWS_AS(regularity_constant(ss, 0, FilterKind::tikhonov, regularity_t_grid(ss)),
                  std::invalid_argument);
}

TEST_CASE("landweber filter refuses an unscaled spectrum") {
  SingularSystem ss = power_decay_system(20, 8);
  for (double& s : ss.sigma) s *= 2.0;  // sigma_max^2 = 4
  ss.t0 = 4.0;
  CHECK_THROWS_AS(regularity_constant(ss, 1, FilterKind::landweber, regularity_t_grid(ss)),
                  std::invalid_argument);
  const SingularSystem scaled = rescale_sigma(ss);
  CHECK(scaled.sigma.front() == 1.0);
  CHECK(scaled.t0 == 1.0);
  CHECK(scaled.sigma.back() == doctest::Approx(ss.sigma.back() / ss.sigma.front()).epsilon(1e-15));
  CHECK(scaled.noise_coeffs == ss.noise_coeffs);
  CHECK(scaled.sol_coeffs == ss.sol_coeffs);
}

TEST_CASE("weighted jacobian svd delivers a genuine singular system") {
  const ProblemPtr p = make_hammerstein(24);
  const GridFunction x = p->benchmark().x_dagger;
  const JacobianSvd svd = jacobian_svd(*p, x);
  REQUIRE(!svd.sigma.empty());

  const InnerProduct& xip = p->domain();
  const InnerProduct& yip = p->range();
  for (size_t i = 0; i < svd.sigma.size(); ++i) {
    if (i > 0) CHECK(svd.sigma[i] <= svd.sigma[i - 1]);
    GridFunction img = p->deriv(x, svd.u[i]);
    axpy(-svd.sigma[i], svd.v[i], img);
    CHECK(yip.norm(img) < 1e-10 * svd.sigma.front());
  }
  for (size_t i = 0; i < svd.u.size(); ++i) {
    for (size_t j = i; j < svd.u.size(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(xip.inner(svd.u[i], svd.u[j]) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(yip.inner(svd.v[i], svd.v[j]) == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  const double opnorm = estimate_opnorm(
      [&](const GridFunction& h) { return p->deriv(x, h); },
      [&](const GridFunction& r) { return p->adjoint(x, r); }, p->domain());
  CHECK(svd.sigma.front() == doctest::Approx(opnorm).epsilon(1e-8));
  CHECK(svd.condition_number() == doctest::Approx(svd.sigma.front() / svd.sigma.back()).epsilon(1e-12));
}

TEST_CASE("autoconvolution at the benchmark solution is rank three") {
  // F'(x) h = 2 x * h is diagonal in fourier with eigenvalue 2 x_hat(m),
  // and the benchmark solution has mass only at modes 0 and +-1
  const ProblemPtr p = make_autoconv(60);
  const JacobianSvd svd = jacobian_svd(*p, p->benchmark().x_dagger);
  REQUIRE(svd.sigma.size() == 3);
  CHECK(svd.sigma[0] == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(svd.sigma[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(svd.sigma[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("singular systems collect the weighted coefficients") {
  const ProblemPtr p = make_hammerstein(16);
  const GridFunction x = p->benchmark().x_dagger;
  const JacobianSvd svd = jacobian_svd(*p, x);

  GridFunction noise = make_function(p->range().grid(), Space::l2);
  noise.values = gaussian_vector(55, 0, noise.size());
  const SingularSystem ss = make_singular_system(svd, *p, x, noise);

  REQUIRE(ss.sigma.size() == svd.sigma.size());
  CHECK(ss.t0 == svd.sigma.front() * svd.sigma.front());
  for (size_t i = 0; i < ss.sigma.size(); ++i) {
    CHECK(ss.sigma[i] == svd.sigma[i]);
    CHECK(ss.noise_coeffs[i] ==
          doctest::Approx(std::abs(p->range().inner(noise, svd.v[i]))).epsilon(1e-12));
    CHECK(ss.sol_coeffs[i] ==
          doctest::Approx(std::abs(p->domain().inner(x, svd.u[i]))).epsilon(1e-12));
  }
}

TEST_CASE("tangential cone ratio vanishes for a linear map and counts skips") {
  std::vector<double> d(17), c(17, 0.0);
  for (size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + 0.1 * static_cast<double>(i);
  const testref::StubProblem p = testref::make_diagonal_stub(d, c);
  const GridFunction center = make_function(p.domain().grid(), Space::l2, 1.0);

  const TccReport lin = tcc_ratio(p, center, 0.5, 40, 9);
  CHECK(lin.used + lin.skipped == 40);
  CHECK(lin.skipped == 0);
  CHECK(lin.eta_max < 1e-12);
  CHECK(lin.eta_median <= lin.eta_p90);
  CHECK(lin.eta_p90 <= lin.eta_max);

  // a fence through the sphere: some sampled pairs must be discarded
  testref::StubProblem fenced = testref::make_diagonal_stub(d, c);
  fenced.fence_ = [](const GridFunction& x) {
    if (x.values[0] > 1.02) return DomainCheck{false, "beyond the fence"};
    return DomainCheck{true, ""};
  };
  const TccReport cut = tcc_ratio(fenced, center, 0.5, 40, 9);
  CHECK(cut.used + cut.skipped == 40);
  CHECK(cut.skipped > 0);
  CHECK(cut.used > 0);
}
