#include "catmap/expsum.hpp"

#include <cmath>
#include <memory>
#include <unordered_map>

#include "catmap/parallel.hpp"

namespace catmap {

namespace {

// Root tables are reused across the many short sums of a scan.
const RootTable& cached_roots(Int M) {
  thread_local std::unordered_map<Int, std::unique_ptr<RootTable>> cache;
  auto& slot = cache[M];
  if (!slot) slot = std::make_unique<RootTable>(M);
  return *slot;
}

}  // namespace

CubicPoly CubicPoly::make(Int a3, Int a2, Int a1, Int a0, Int p, int n) {
  if (n < 0) throw std::invalid_argument("CubicPoly: negative exponent");
  const Int M = ipow(p, n);
  return CubicPoly{reduce(a3, M), reduce(a2, M), reduce(a1, M), reduce(a0, M), p, n, M};
}

Int CubicPoly::operator()(Int z) const {
  z = reduce(z, M);
  Int v = mul_mod(a3, z, M);
  v = mul_mod(add_mod(v, a2, M), z, M);
  v = mul_mod(add_mod(v, a1, M), z, M);
  return add_mod(v, a0, M);
}

Int CubicPoly::derivative(Int z) const {
  z = reduce(z, M);
  Int v = mul_mod(3 * a3 % M, z, M);
  v = mul_mod(add_mod(v, 2 * a2 % M, M), z, M);
  return add_mod(v, a1, M);
}

Complex exp_sum_direct(const CubicPoly& q) {
  const Int M = q.M;
  if (M == 1) return 1.0;
  const RootTable& roots = cached_roots(M);
  Complex acc = 0.0;
  // All products stay below M^2 < 2^62 for desk-scale moduli.
  for (Int z = 0; z < M; ++z) {
    Int v = (q.a3 * z) % M;
    v = ((v + q.a2) * z) % M;
    v = ((v + q.a1) * z) % M;
    v = (v + q.a0) % M;
    acc += roots.at_reduced(v);
  }
  return acc;
}

const char* to_string(ReductionRoute r) {
  switch (r) {
    case ReductionRoute::ExaktExp: return "exakt-exp";
    case ReductionRoute::Exp: return "exp";
    case ReductionRoute::Exp2: return "exp2";
    case ReductionRoute::Direct: return "direct";
  }
  return "?";
}

ReductionRoute classify_route(const CubicPoly& q) {
  const Int p = q.p;
  if (p <= 3 || q.n < 1) return ReductionRoute::Direct;
  if (q.a3 % p == 0 && q.a2 % p != 0) return ReductionRoute::ExaktExp;
  if (q.a3 % p != 0 && q.a2 == 0) {
    if (q.a1 % (p * p) != 0) return ReductionRoute::Exp;
    if (q.n >= 3) return ReductionRoute::Exp2;
  }
  return ReductionRoute::Direct;
}

Complex exp_sum_stationary(const CubicPoly& q) {
  const Int p = q.p;
  const int n = q.n;
  if (n == 0) return 1.0;
  if (n == 1) return exp_sum_direct(q);
  const double pd = static_cast<double>(p);

  // q' = 0 mod p identically: q = a0 + p g and the sum drops one level.
  if (q.a3 % p == 0 && q.a2 % p == 0 && q.a1 % p == 0) {
    const auto g = CubicPoly::make(q.a3 / p, q.a2 / p, q.a1 / p, 0, p, n - 1);
    return unit_root(q.a0, q.M) * pd * exp_sum_stationary(g);
  }

  // z = u + p^{n-1} w kills every u with p not dividing q'(u); the survivors
  // are u = rho + p v with rho a critical point modulo p, and
  // q(rho + p v) = q(rho) + p^2 (a3 p v^3 + (3 a3 rho + a2) v^2 + (q'(rho)/p) v).
  Complex acc = 0.0;
  for (Int rho = 0; rho < p; ++rho) {
    const Int d = q.derivative(rho);
    if (d % p != 0) continue;
    const auto q1 = CubicPoly::make(q.a3 * p, 3 * q.a3 * rho + q.a2, d / p, 0, p, n - 2);
    acc += unit_root(q(rho), q.M) * exp_sum_stationary(q1);
  }
  return pd * acc;
}

ReducedSum exp_sum_reduced(const CubicPoly& q) {
  ReducedSum out;
  out.route = classify_route(q);
  switch (out.route) {
    case ReductionRoute::Direct:
      out.value = exp_sum_direct(q);
      out.reduced = false;
      return out;
    case ReductionRoute::Exp2: {
      const Int p2 = q.p * q.p;
      const auto inner = CubicPoly::make(q.a3, 0, q.a1 / p2, 0, q.p, q.n - 3);
      out.value = static_cast<double>(p2) * unit_root(q.a0, q.M) * exp_sum_stationary(inner);
      out.reduced = true;
      return out;
    }
    case ReductionRoute::ExaktExp:
    case ReductionRoute::Exp:
      out.value = exp_sum_stationary(q);
      out.reduced = true;
      return out;
  }
  return out;
}

double a_constant(Int alpha, int n, Int p) {
  if (n != 1 && n != 2) throw std::invalid_argument("a_constant is defined for n in {1, 2}");
  const Int M = ipow(p, n);
  if (gcd(alpha, p) != 1) throw NonUnitError(reduce(alpha, M), M, p);
  double best = 0.0;
  for (Int t = 0; t < M; ++t)
    best = std::max(best, std::abs(exp_sum_direct(CubicPoly::make(alpha, 0, t, 0, p, n))));
  return best / std::sqrt(static_cast<double>(M));
}

double expsats_sup(Int alpha, int n, Int p) {
  if (n < 1) throw std::invalid_argument("expsats_sup needs n >= 1");
  if (gcd(alpha, p) != 1) throw NonUnitError(alpha, p, p);
  const double pd = static_cast<double>(p);
  const double base = 2.0 * n / 3.0;
  switch (n % 3) {
    case 0:
      return std::pow(pd, base);
    case 1:
      return a_constant(alpha, 1, p) * std::pow(pd, base - 1.0 / 6.0);
    default:
      return a_constant(alpha, 2, p) * std::pow(pd, base - 1.0 / 3.0);
  }
}

double expsats_sup_brute(Int alpha, int n, Int p, int jobs) {
  const Int M = ipow(p, n);
  if (gcd(alpha, p) != 1) throw NonUnitError(reduce(alpha, M), M, p);
  std::vector<Int> cube(M);
  for (Int z = 0; z < M; ++z) cube[z] = mul_mod(alpha, mul_mod(z, mul_mod(z, z, M), M), M);
  const RootTable roots(M);
  std::vector<double> best(static_cast<std::size_t>(M));
  parallel_for(M, jobs, [&](Int t) {
    Complex acc = 0.0;
    Int tz = 0;
    for (Int z = 0; z < M; ++z) {
      Int e = cube[z] + tz;
      if (e >= M) e -= M;
      acc += roots.at_reduced(e);
      tz += t;
      if (tz >= M) tz -= M;
    }
    best[t] = std::abs(acc);
  });
  return *std::max_element(best.begin(), best.end());
}

ReductionAudit audit_reductions(Int p, int n, double tol, int jobs) {
  const Int M = ipow(p, n);
  struct Pattern {
    Int a3, a2, a1;
  };
  std::vector<Pattern> patterns;
  if (n <= 3) {
    for (Int a3 = 0; a3 < M; ++a3)
      for (Int a2 = 0; a2 < M; ++a2)
        for (Int a1 = 0; a1 < M; ++a1) patterns.push_back({a3, a2, a1});
  } else {
    for (Int a3 = 0; a3 < M; a3 += p)
      for (Int a2 = 0; a2 < M; ++a2)
        if (a2 % p != 0)
          for (Int a1 = 0; a1 < p; ++a1) patterns.push_back({a3, a2, a1});
    for (Int a3 = 0; a3 < M; ++a3)
      if (a3 % p != 0)
        for (Int a1 = 0; a1 < M; ++a1) patterns.push_back({a3, 0, a1});
  }
  std::vector<double> err(patterns.size());
  std::vector<char> scope(patterns.size());
  parallel_for(static_cast<Int>(patterns.size()), jobs, [&](Int i) {
    const auto& pt = patterns[i];
    const auto q = CubicPoly::make(pt.a3, pt.a2, pt.a1, 0, p, n);
    const auto r = exp_sum_reduced(q);
    scope[i] = r.reduced;
    err[i] = std::abs(std::abs(r.value) - std::abs(exp_sum_direct(q)));
  });
  ReductionAudit audit{p, n, static_cast<Int>(patterns.size()), 0, 0, 0.0};
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    audit.in_scope += scope[i];
    audit.mismatches += err[i] > tol;
    audit.worst = std::max(audit.worst, err[i]);
  }
  return audit;
}

std::vector<Int> cube_class_representatives(Int p) {
  if (p % 3 != 1) return {1};
  const auto u = units(p);
  const Int g = find_generator<Int>(u, 1, [p](Int x, Int y) { return mul_mod(x, y, p); });
  return {1, g, mul_mod(g, g, p)};
}

}  // namespace catmap
