#pragma once

#include "core/operator.hpp"

namespace regstop {

struct IterationConfig {
  double omega = 0.0;  // stepsize, required positive
  int kmax = 0;        // paired index bound; the doubled sequence runs to 2*kmax

  /// Abort when ||x_k - x0||_X exceeds this radius; non-positive disables.
  double divergence_radius = 0.0;
  /// Abort when the residual exceeds this multiple of the initial residual;
  /// non-positive disables.
  double residual_blowup = 10.0;
};

enum class Termination {
  completed,
  domain_violation,
  radius_exceeded,
  residual_blowup,
  non_finite,
};

const char* to_string(Termination t);

/// Everything the stopping rules need from one Landweber run, recorded with
/// two synchronized passes over the same sequence: a tortoise at index k and
/// a hare at index 2k. Memory stays O(1) in kmax; no iterate is stored.
///
/// Tortoise-indexed series run over k = 0..residual_limit(); paired series
/// over k = 0..paired_limit(). When a guard trips at sequence index j, the
/// iterates up to j-1 remain valid, so the paired range ends at
/// floor((j-1)/2) while the tortoise keeps going until it meets the same
/// invalid iterate itself (or kmax, whichever is first).
struct PairedTrace {
  std::vector<double> residual_norm;  // ||F(x_k) - y_delta||_Y
  std::vector<double> error;          // ||x_k - x_dagger||_X, empty without a reference
  std::vector<double> dist_to_x0;     // ||x_k - x0||_X

  std::vector<double> qo;       // ||x_{2k} - x_k||_X
  std::vector<double> ls;       // <x_k, x_{2k} - x_k>_X
  std::vector<double> hr_pair;  // <y_delta - F(x_{2k}), y_delta - F(x_k)>_Y

  Termination termination = Termination::completed;
  long long termination_index = -1;  // first invalid sequence index, -1 if none

  long long tortoise_steps = 0;
  long long hare_steps = 0;
  long long forward_evals = 0;
  long long adjoint_evals = 0;

  int residual_limit() const { return static_cast<int>(residual_norm.size()) - 1; }
  int paired_limit() const { return static_cast<int>(qo.size()) - 1; }
  bool has_error() const { return !error.empty(); }
};

/// One explicit step x + omega * F'(x)^*(y_delta - F(x)): exactly one
/// forward and one adjoint evaluation.
GridFunction landweber_step(const Problem& p, const GridFunction& x,
                            const GridFunction& y_delta, double omega);

/// Runs the paired iteration. x0 must satisfy the domain check. Passing the
/// exact solution enables the error series (benchmark mode).
PairedTrace run_paired(const Problem& p, const GridFunction& y_delta,
                       const GridFunction& x0, const IterationConfig& cfg,
                       const GridFunction* x_dagger = nullptr);

/// omega = safety / ||F'(x_ref)||^2 with the norm from power iteration.
double auto_stepsize(const Problem& p, const GridFunction& x_ref,
                     double safety = 1.0, int iters = 600, double tol = 1e-10);

}  // namespace regstop
