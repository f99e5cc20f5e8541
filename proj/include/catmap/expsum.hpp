#pragma once

// Complete exponential sums S(q, n) = sum_{z mod p^n} e(q(z) / p^n) of cubic
// polynomials, their stationary-phase reduction, and the normalized suprema
// A_{alpha, n} over linear perturbations of alpha z^3.

#include <string>
#include <vector>

#include "catmap/residue.hpp"
#include "catmap/state.hpp"

namespace catmap {

/// a3 z^3 + a2 z^2 + a1 z + a0 over Z_{p^n}.
struct CubicPoly {
  Int a3 = 0, a2 = 0, a1 = 0, a0 = 0;
  Int p = 0;
  int n = 0;
  Int M = 1;  ///< p^n

  /// Reduces the coefficients modulo p^n.
  static CubicPoly make(Int a3, Int a2, Int a1, Int a0, Int p, int n);
  Int operator()(Int z) const;
  /// q'(z) modulo p^n.
  Int derivative(Int z) const;
};

Complex exp_sum_direct(const CubicPoly& q);

enum class ReductionRoute {
  ExaktExp,  ///< p | a3, p does not divide a2: |S| = p^{n/2}
  Exp,       ///< p does not divide a3, a2 = 0, p^2 does not divide a1
  Exp2,      ///< p does not divide a3, a2 = 0, p^2 | a1: S = p^2 e(a0/p^n) S(a3 z^3 + (a1/p^2) z, n - 3)
  Direct     ///< no reduction applies
};

const char* to_string(ReductionRoute r);

/// Which reduction covers q (p > 3).
ReductionRoute classify_route(const CubicPoly& q);

struct ReducedSum {
  Complex value;
  ReductionRoute route = ReductionRoute::Direct;
  bool reduced = false;  ///< false: fell back to direct summation
};

/// Evaluates S(q, n) by the stationary-point recursion z = u + p^{n-1} w,
/// which lowers n by 2 at every critical point of q modulo p (and by 1 when
/// q' vanishes identically modulo p). Falls back to direct summation with
/// reduced = false outside the reducible patterns.
ReducedSum exp_sum_reduced(const CubicPoly& q);

/// The recursion itself, valid for every cubic when p > 3.
Complex exp_sum_stationary(const CubicPoly& q);

/// sup_t |S(alpha z^3 + t z, n)| / p^{n/2} by scanning t over Z_{p^n}.
double a_constant(Int alpha, int n, Int p);

/// sup_t |S(alpha z^3 + t z, n)| from the three-case closed form.
double expsats_sup(Int alpha, int n, Int p);
/// The same supremum by direct summation over every t.
double expsats_sup_brute(Int alpha, int n, Int p, int jobs = 1);

/// Reduced-vs-direct comparison over the reducible patterns at exponent n: every
/// (a3, a2, a1) for n <= 3; for n >= 4 the a2 = 0 patterns over all (a3, a1) and
/// the exakt-exp patterns over p | a3, unit a2, a1 in [0, p).
struct ReductionAudit {
  Int p = 0;
  int n = 0;
  Int checked = 0;     ///< sums evaluated both ways
  Int in_scope = 0;    ///< of which a reduction applied
  Int mismatches = 0;  ///< modulus differs by more than tol
  double worst = 0.0;
};
ReductionAudit audit_reductions(Int p, int n, double tol = 1e-9, int jobs = 1);

/// Representatives 1, g, g^2 of the cube classes of Z_p^x (just 1 when p = 2 mod 3).
std::vector<Int> cube_class_representatives(Int p);

}  // namespace catmap
