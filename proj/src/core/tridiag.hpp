#pragma once

#include <vector>

namespace regstop {

/// Symmetric positive definite tridiagonal matrix, stored by diagonals.
/// diag has size m, off has size m-1 (off[i] couples rows i and i+1).
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// LDL^T factorization of an SPD tridiagonal matrix. The factorization is
/// computed once and solves are const, so a factor can be shared across
/// threads once built.
class TridiagFactor {
 public:
  explicit TridiagFactor(const Tridiag& a);

  /// Solves A x = b.
  std::vector<double> solve(const std::vector<double>& b) const;

  int size() const { return static_cast<int>(d_.size()); }

 private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers
};

}  // namespace regstop
