#pragma once

// State vectors in L^2(Z_N) and exact roots of unity.
//
// A state is a plain Eigen column vector of complex amplitudes indexed by
// Z_N. The inner product carries the 1/N weight,
//
//     <phi, psi> = (1/N) sum_Q phi(Q) conj(psi(Q)),
//
// so the constant function has norm one.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "catmap/residue.hpp"

namespace catmap {

template <typename Real>
using BasicStateVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using BasicOperatorMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using StateVector = BasicStateVector<double>;
using OperatorMatrix = BasicOperatorMatrix<double>;

/// e(n/M) = exp(2 pi i n / M), with n reduced modulo M before conversion.
template <typename Real = double>
std::complex<Real> unit_root(Int n, Int M) {
  Int r = reduce(n, M);
  if (2 * r > M) r -= M;  // symmetric residue keeps the angle small
  const Real angle = Real(2) * std::numbers::pi_v<Real> * Real(r) / Real(M);
  return {std::cos(angle), std::sin(angle)};
}

/// Table of e(j/M) for j in [0, M).
template <typename Real = double>
class BasicRootTable {
 public:
  explicit BasicRootTable(Int M) : M_(M), roots_(static_cast<std::size_t>(M)) {
    for (Int j = 0; j < M; ++j) roots_[static_cast<std::size_t>(j)] = unit_root<Real>(j, M);
  }
  Int modulus() const { return M_; }
  const std::complex<Real>& operator()(Int n) const {
    return roots_[static_cast<std::size_t>(reduce(n, M_))];
  }
  /// Caller guarantees 0 <= n < M.
  const std::complex<Real>& at_reduced(Int n) const { return roots_[static_cast<std::size_t>(n)]; }

 private:
  Int M_;
  std::vector<std::complex<Real>> roots_;
};
using RootTable = BasicRootTable<double>;

template <typename DerivedA, typename DerivedB>
auto inner_product(const Eigen::MatrixBase<DerivedA>& phi, const Eigen::MatrixBase<DerivedB>& psi) {
  // Eigen's dot conjugates the first argument.
  return psi.dot(phi) / static_cast<typename DerivedA::RealScalar>(phi.size());
}

template <typename Derived>
typename Derived::RealScalar l2_norm(const Eigen::MatrixBase<Derived>& psi) {
  return psi.norm() / std::sqrt(static_cast<typename Derived::RealScalar>(psi.size()));
}

template <typename Derived>
auto normalized(const Eigen::MatrixBase<Derived>& psi) {
  return (psi / l2_norm(psi)).eval();
}

template <typename Derived>
typename Derived::RealScalar sup_norm(const Eigen::MatrixBase<Derived>& psi) {
  return psi.cwiseAbs().maxCoeff();
}

/// Point mass at x (value 1 at x, 0 elsewhere).
StateVector delta_state(Int N, Int x);

/// Rotates psi so that its first amplitude with modulus above `threshold` is real positive.
void fix_global_phase(StateVector& psi, double threshold = 1e-9);

}  // namespace catmap
