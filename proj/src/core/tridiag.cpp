#include "core/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace regstop {

std::vector<double> Tridiag::apply(const std::vector<double>& x) const {
  const int m = size();
  if (static_cast<int>(x.size()) != m) throw std::invalid_argument("tridiag apply: size mismatch");
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < m) v += off[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

TridiagFactor::TridiagFactor(const Tridiag& a) {
  const int m = a.size();
  if (m == 0) throw std::invalid_argument("tridiag factor: empty matrix");
  if (static_cast<int>(a.off.size()) != m - 1)
    throw std::invalid_argument("tridiag factor: off-diagonal size mismatch");
  d_.resize(m);
  l_.assign(m > 1 ? m - 1 : 0, 0.0);
  d_[0] = a.diag[0];
  for (int i = 1; i < m; ++i) {
    if (!(d_[i - 1] > 0.0)) throw std::runtime_error("tridiag factor: matrix not positive definite");
    l_[i - 1] = a.off[i - 1] / d_[i - 1];
    d_[i] = a.diag[i] - l_[i - 1] * a.off[i - 1];
  }
  if (!(d_[m - 1] > 0.0)) throw std::runtime_error("tridiag factor: matrix not positive definite");
}

std::vector<double> TridiagFactor::solve(const std::vector<double>& b) const {
  const int m = size();
  if (static_cast<int>(b.size()) != m) throw std::invalid_argument("tridiag solve: size mismatch");
  std::vector<double> x = b;
  for (int i = 1; i < m; ++i) x[i] -= l_[i - 1] * x[i - 1];
  for (int i = 0; i < m; ++i) x[i] /= d_[i];
  for (int i = m - 2; i >= 0; --i) x[i] -= l_[i] * x[i + 1];
  return x;
}

}  // namespace regstop
