#include "core/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace regstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDenseCap = 512;
constexpr double kRankCutoff = 1e-13;  // relative to sigma_max

void validate_system(const SingularSystem& ss, bool need_noise, bool need_sol) {
  if (ss.sigma.empty()) throw std::invalid_argument("singular system: empty spectrum");
  for (size_t i = 0; i < ss.sigma.size(); ++i) {
    if (!(ss.sigma[i] > 0.0)) throw std::invalid_argument("singular system: sigma must be positive");
    if (i > 0 && ss.sigma[i] > ss.sigma[i - 1])
      throw std::invalid_argument("singular system: sigma must be descending");
  }
  if (need_noise && ss.noise_coeffs.size() != ss.sigma.size())
    throw std::invalid_argument("singular system: noise coefficient count mismatch");
  if (need_sol && ss.sol_coeffs.size() != ss.sigma.size())
    throw std::invalid_argument("singular system: solution coefficient count mismatch");
  if (!(ss.t0 > 0.0)) throw std::invalid_argument("singular system: t0 must be positive");
}

void validate_t_grid(const SingularSystem& ss, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("t_grid: empty");
  for (double t : t_grid) {
    if (!(t > 0.0) || t > ss.t0 * (1.0 + 1e-12))
      throw std::invalid_argument("t_grid: t = " + std::to_string(t) + " outside (0, t0]");
  }
}

void validate_p(int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("p must be 1 or 2");
}

/// Number of leading indices with sigma_i^2 >= t (sigma descending).
int head_count(const std::vector<double>& sigma, double t) {
  int lo = 0, hi = static_cast<int>(sigma.size());
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (sigma[static_cast<size_t>(mid)] * sigma[static_cast<size_t>(mid)] >= t)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

std::vector<double> distinct_squares_desc(const std::vector<double>& sigma) {
  std::vector<double> s2;
  for (double s : sigma) {
    const double v = s * s;
    if (s2.empty() || v < s2.back()) s2.push_back(v);
  }
  return s2;
}

double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const int idx = std::max(0, static_cast<int>(std::ceil(q * sorted.size())) - 1);
  return sorted[static_cast<size_t>(std::min<int>(idx, static_cast<int>(sorted.size()) - 1))];
}

}  // namespace

double JacobianSvd::condition_number() const {
  if (sigma.empty()) return kInf;
  return sigma.front() / sigma.back();
}

JacobianSvd jacobian_svd(const Problem& p, const GridFunction& x) {
  const InnerProduct& xip = p.domain();
  const InnerProduct& yip = p.range();
  const int n = xip.grid().sample_count();
  const int m = yip.grid().sample_count();
  if (n > kDenseCap || m > kDenseCap)
    throw std::invalid_argument("jacobian_svd: grid exceeds the dense cap of " +
                                std::to_string(kDenseCap) + " samples");

  Eigen::MatrixXd J(m, n);
  for (int j = 0; j < n; ++j) {
    GridFunction e = make_function(xip.grid(), xip.space());
    e.values[static_cast<size_t>(j)] = 1.0;
    const GridFunction col = p.deriv(x, e);
    for (int i = 0; i < m; ++i) J(i, j) = col.values[static_cast<size_t>(i)];
  }

  // whiten both sides: B = Wy^{1/2} J Lx^{-T} with Gx = Lx Lx^T
  Eigen::VectorXd wy_sqrt(m);
  for (int i = 0; i < m; ++i) wy_sqrt(i) = std::sqrt(yip.quad_weights()[static_cast<size_t>(i)]);

  Eigen::MatrixXd B;
  Eigen::MatrixXd Lx;  // empty for diagonal domain Gram
  Eigen::VectorXd wx_sqrt;
  if (xip.space() == Space::h1) {
    const Tridiag& g = xip.gram();
    Eigen::MatrixXd Gx = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      Gx(i, i) = g.diag[static_cast<size_t>(i)];
      if (i + 1 < n) {
        Gx(i, i + 1) = g.off[static_cast<size_t>(i)];
        Gx(i + 1, i) = g.off[static_cast<size_t>(i)];
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(Gx);
    if (llt.info() != Eigen::Success) throw std::runtime_error("jacobian_svd: Gram factorization failed");
    Lx = llt.matrixL();
    Eigen::MatrixXd Jt = J.transpose();
    Lx.triangularView<Eigen::Lower>().solveInPlace(Jt);  // Jt <- Lx^{-1} J^T
    B = wy_sqrt.asDiagonal() * Jt.transpose();
  } else {
    wx_sqrt.resize(n);
    for (int j = 0; j < n; ++j) wx_sqrt(j) = std::sqrt(xip.quad_weights()[static_cast<size_t>(j)]);
    B = wy_sqrt.asDiagonal() * J * wx_sqrt.cwiseInverse().asDiagonal();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();

  JacobianSvd out;
  const double cutoff = s.size() > 0 ? s(0) * kRankCutoff : 0.0;
  for (int i = 0; i < s.size(); ++i) {
    if (!(s(i) > cutoff)) break;  // descending: the rest is numerical null space
    out.sigma.push_back(s(i));

    Eigen::VectorXd ui = svd.matrixV().col(i);
    if (xip.space() == Space::h1)
      Lx.transpose().triangularView<Eigen::Upper>().solveInPlace(ui);
    else
      ui = ui.cwiseQuotient(wx_sqrt);
    GridFunction ug = make_function(xip.grid(), xip.space());
    for (int j = 0; j < n; ++j) ug.values[static_cast<size_t>(j)] = ui(j);
    out.u.push_back(std::move(ug));

    const Eigen::VectorXd vi = svd.matrixU().col(i).cwiseQuotient(wy_sqrt);
    GridFunction vg = make_function(yip.grid(), yip.space());
    for (int j = 0; j < m; ++j) vg.values[static_cast<size_t>(j)] = vi(j);
    out.v.push_back(std::move(vg));
  }
  if (out.sigma.empty()) throw std::runtime_error("jacobian_svd: zero derivative");
  return out;
}

SingularSystem make_singular_system(const JacobianSvd& svd, const Problem& p,
                                    const GridFunction& x_dagger, const GridFunction& noise) {
  SingularSystem ss;
  ss.sigma = svd.sigma;
  ss.t0 = svd.sigma.front() * svd.sigma.front();
  for (size_t i = 0; i < svd.sigma.size(); ++i) {
    ss.noise_coeffs.push_back(std::abs(p.range().inner(noise, svd.v[i])));
    ss.sol_coeffs.push_back(std::abs(p.domain().inner(x_dagger, svd.u[i])));
  }
  return ss;
}

SingularSystem rescale_sigma(const SingularSystem& ss) {
  validate_system(ss, false, false);
  SingularSystem out = ss;
  const double smax = ss.sigma.front();
  for (double& s : out.sigma) s /= smax;
  out.t0 = 1.0;
  return out;
}

std::vector<double> muckenhoupt_t_grid(const SingularSystem& ss) {
  validate_system(ss, false, false);
  std::vector<double> s2 = distinct_squares_desc(ss.sigma);
  s2.pop_back();  // at the smallest square the strict-below side is empty
  if (s2.empty())
    throw std::invalid_argument("muckenhoupt_t_grid: spectrum has a single level, no scan range");
  std::erase_if(s2, [&](double t) { return t > ss.t0; });
  if (s2.empty()) throw std::invalid_argument("muckenhoupt_t_grid: t0 below every breakpoint");
  return s2;
}

std::vector<double> regularity_t_grid(const SingularSystem& ss) {
  validate_system(ss, false, false);
  std::vector<double> s2 = distinct_squares_desc(ss.sigma);
  s2.erase(s2.begin());  // at the largest square the strict-above side is empty
  if (s2.empty())
    throw std::invalid_argument("regularity_t_grid: spectrum has a single level, no scan range");
  std::erase_if(s2, [&](double t) { return t > ss.t0; });
  if (s2.empty()) throw std::invalid_argument("regularity_t_grid: t0 below every breakpoint");
  return s2;
}

ScanResult muckenhoupt_constant(const SingularSystem& ss, int p,
                                const std::vector<double>& t_grid) {
  validate_system(ss, true, false);
  validate_p(p);
  validate_t_grid(ss, t_grid);
  const size_t n = ss.sigma.size();

  // prefix sums of e^2/sigma^2 (head) and suffix sums of e^2, sigma^2 e^2
  // (tail); each t then costs one binary search
  std::vector<double> head(n + 1, 0.0), tail_p1(n + 1, 0.0), tail_p2(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double e2 = ss.noise_coeffs[i] * ss.noise_coeffs[i];
    head[i + 1] = head[i] + e2 / (ss.sigma[i] * ss.sigma[i]);
  }
  for (size_t i = n; i > 0; --i) {
    const double e2 = ss.noise_coeffs[i - 1] * ss.noise_coeffs[i - 1];
    tail_p1[i - 1] = tail_p1[i] + e2;
    tail_p2[i - 1] = tail_p2[i] + ss.sigma[i - 1] * ss.sigma[i - 1] * e2;
  }

  ScanResult best{-1.0, 0.0};
  for (double t : t_grid) {
    const int m = head_count(ss.sigma, t);
    const double lhs = t * head[static_cast<size_t>(m)];
    const double rhs = p == 1 ? tail_p1[static_cast<size_t>(m)] : tail_p2[static_cast<size_t>(m)] / t;
    double ratio;
    if (rhs > 0.0)
      ratio = lhs / rhs;
    else
      ratio = lhs > 0.0 ? kInf : 0.0;
    if (ratio > best.constant) best = {ratio, t};
  }
  return best;
}

ScanResult regularity_constant(const SingularSystem& ss, int p, FilterKind filter,
                               const std::vector<double>& t_grid) {
  validate_system(ss, false, true);
  validate_p(p);
  validate_t_grid(ss, t_grid);
  const size_t n = ss.sigma.size();
  if (filter == FilterKind::landweber && ss.sigma.front() * ss.sigma.front() > 1.0 + 1e-12)
    throw std::invalid_argument(
        "regularity_constant: the Landweber filter needs sigma_max^2 <= 1; rescale_sigma first");

  std::vector<double> tail_x2(n + 1, 0.0);
  for (size_t i = n; i > 0; --i)
    tail_x2[i - 1] = tail_x2[i] + ss.sol_coeffs[i - 1] * ss.sol_coeffs[i - 1];

  ScanResult best{-1.0, 0.0};
  for (double t : t_grid) {
    // strictly-above head: sigma^2 > t, i.e. drop the ties that >= keeps
    int q = head_count(ss.sigma, t);
    while (q > 0 && ss.sigma[static_cast<size_t>(q - 1)] * ss.sigma[static_cast<size_t>(q - 1)] <= t) --q;
    const double num = tail_x2[static_cast<size_t>(q)];
    double den = 0.0;
    for (int i = 0; i < q; ++i) {
      const double lam = ss.sigma[static_cast<size_t>(i)] * ss.sigma[static_cast<size_t>(i)];
      const double r = filter == FilterKind::tikhonov
                           ? t / (t + lam)
                           : std::pow(std::max(0.0, 1.0 - lam), 1.0 / t);
      const double weight = p == 1 ? 1.0 : lam / t;
      den += weight * r * r * ss.sol_coeffs[static_cast<size_t>(i)] * ss.sol_coeffs[static_cast<size_t>(i)];
    }
    double ratio;
    if (den > 0.0)
      ratio = num / den;
    else
      ratio = num > 0.0 ? kInf : 0.0;
    if (ratio > best.constant) best = {ratio, t};
  }
  return best;
}

TccReport tcc_ratio(const Problem& p, const GridFunction& center, double radius, int samples,
                    uint64_t seed) {
  if (!(radius > 0.0)) throw std::invalid_argument("tcc_ratio: radius must be positive");
  if (samples < 1) throw std::invalid_argument("tcc_ratio: samples must be positive");
  {
    const DomainCheck dc = p.domain_check(center);
    if (!dc.inside) throw std::invalid_argument("tcc_ratio: center outside domain: " + dc.reason);
  }
  const InnerProduct& xip = p.domain();
  const InnerProduct& yip = p.range();
  const double floor = 1e-14 * yip.norm(p.apply(center));

  auto sphere_point = [&](uint64_t stream) {
    GridFunction d = make_function(xip.grid(), xip.space());
    d.values = gaussian_vector(seed, stream, d.size());
    const double nd = xip.norm(d);
    if (nd == 0.0) return center;  // measure zero; lands on the center, gets skipped
    GridFunction x = center;
    axpy(radius / nd, d, x);
    return x;
  };

  TccReport rep;
  std::vector<double> etas;
  for (int s = 0; s < samples; ++s) {
    const GridFunction x = sphere_point(static_cast<uint64_t>(2 * s));
    const GridFunction xt = sphere_point(static_cast<uint64_t>(2 * s + 1));
    if (!p.domain_check(x).inside || !p.domain_check(xt).inside) {
      ++rep.skipped;
      continue;
    }
    const GridFunction fdiff = subtract(p.apply(x), p.apply(xt));
    const double den = yip.norm(fdiff);
    if (den <= floor) {
      ++rep.skipped;
      continue;
    }
    GridFunction defect = fdiff;
    axpy(-1.0, p.deriv(x, subtract(x, xt)), defect);
    etas.push_back(yip.norm(defect) / den);
  }
  if (etas.empty()) throw std::runtime_error("tcc_ratio: every sample was skipped");

  rep.used = static_cast<int>(etas.size());
  std::sort(etas.begin(), etas.end());
  rep.eta_max = etas.back();
  rep.eta_median = nearest_rank(etas, 0.5);
  rep.eta_p90 = nearest_rank(etas, 0.9);
  return rep;
}

}  // namespace regstop
