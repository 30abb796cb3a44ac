#pragma once

#include <cstdint>

#include "core/operator.hpp"

namespace regstop {

/// Spectral summary of a linearized problem: singular values together with
/// the data-noise and solution coefficients in the singular bases. sigma is
/// strictly positive and descending; t0 caps the admissible t-range for the
/// weight-condition scans (defaults to sigma_max^2).
struct SingularSystem {
  std::vector<double> sigma;
  std::vector<double> noise_coeffs;  // |<y - y_delta, v_i>_Y|
  std::vector<double> sol_coeffs;    // |<x_dagger, u_i>_X|
  double t0 = 0.0;
};

/// Singular value decomposition of F'(x) between the weighted spaces:
/// F'(x) u_i = sigma_i v_i with <u_i,u_j>_X = <v_i,v_j>_Y = delta_ij.
struct JacobianSvd {
  std::vector<double> sigma;    // descending, numerical null space dropped
  std::vector<GridFunction> u;  // domain side
  std::vector<GridFunction> v;  // range side
  double condition_number() const;
};

/// Dense assembly of the Jacobian (one derivative evaluation per basis
/// vector) followed by an SVD whitened with both Gram factors. Capped at
/// 512 samples per side; these diagnostics are for the shipped grids, not
/// for large-scale use.
JacobianSvd jacobian_svd(const Problem& p, const GridFunction& x);

SingularSystem make_singular_system(const JacobianSvd& svd, const Problem& p,
                                    const GridFunction& x_dagger,
                                    const GridFunction& noise);

/// sigma scaled by 1/sigma_max (t0 becomes 1); the form the Landweber
/// residual filter requires.
SingularSystem rescale_sigma(const SingularSystem& ss);

/// Default scan grids: the squared singular values, which are exactly the
/// breakpoints of the piecewise ratios, minus the one endpoint whose far
/// side is structurally empty (the smallest for the noise condition, the
/// largest for the solution condition). A ratio there is infinite for every
/// system and would say nothing about this one.
std::vector<double> muckenhoupt_t_grid(const SingularSystem& ss);
std::vector<double> regularity_t_grid(const SingularSystem& ss);

struct ScanResult {
  double constant = 0.0;  // may be infinity
  double worst_t = 0.0;   // first maximizer
};

/// Noise weight condition: sup over t of
///   [t * sum_{sigma^2 >= t} |e_i|^2 / sigma_i^2] /
///   [sum_{sigma^2 < t} (sigma_i^2 / t)^{p-1} |e_i|^2],
/// with 0/0 counted as 0 and positive/0 as infinity. p in {1, 2}.
ScanResult muckenhoupt_constant(const SingularSystem& ss, int p,
                                const std::vector<double>& t_grid);

enum class FilterKind { landweber, tikhonov };

/// Solution regularity condition with the residual filter r(lambda, alpha)
/// coupled as alpha = t: sup over t of
///   [sum_{sigma^2 <= t} |x_i|^2] /
///   [sum_{sigma^2 > t} (sigma^2/t)^{p-1} r(sigma^2, t)^2 |x_i|^2].
/// The Landweber filter (1-lambda)^{1/alpha} needs sigma_max^2 <= 1 and
/// errors otherwise; rescale_sigma first.
ScanResult regularity_constant(const SingularSystem& ss, int p, FilterKind filter,
                               const std::vector<double>& t_grid);

struct TccReport {
  double eta_max = 0.0;
  double eta_median = 0.0;
  double eta_p90 = 0.0;
  int used = 0;
  int skipped = 0;
};

/// Samples the tangential-cone ratio
///   eta = ||F(x) - F(x~) - F'(x)(x - x~)|| / ||F(x) - F(x~)||
/// over random pairs on the sphere of the given radius around center.
/// Pairs that leave the domain or whose denominator vanishes against
/// 1e-14 * ||F(center)|| are skipped and counted.
TccReport tcc_ratio(const Problem& p, const GridFunction& center, double radius,
                    int samples, uint64_t seed);

}  // namespace regstop
