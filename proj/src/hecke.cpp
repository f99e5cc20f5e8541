#include "catmap/hecke.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "catmap/expsum.hpp"
#include "catmap/measures.hpp"
#include "catmap/parallel.hpp"

namespace catmap {

const char* to_string(PrimeClass c) {
  switch (c) {
    case PrimeClass::Split: return "split";
    case PrimeClass::Inert: return "inert";
    case PrimeClass::Ramified: return "ramified";
  }
  return "?";
}

PrimeClass classify(Int D, Int p) {
  switch (jacobi_symbol(D, p)) {
    case 1: return PrimeClass::Split;
    case -1: return PrimeClass::Inert;
    default: return PrimeClass::Ramified;
  }
}

PrimeClass HeckeFrame::classification(Int p) const {
  for (const auto& [q, c] : classes)
    if (q == p) return c;
  throw std::invalid_argument(std::to_string(p) + " does not divide N = " + std::to_string(N));
}

TorusMatrix HeckeFrame::conjugate(const TorusMatrix& g) const {
  return TorusMatrix::nb(beta, N) * g * TorusMatrix::nb(-beta, N);
}

HeckeFrame normalize_to_torus(const TorusMatrix& A) {
  const Int N = A.N;
  if (N % 2 == 0) throw UnsupportedModulusError("normalize_to_torus needs odd N");
  if (gcd(A.c, N) != 1)
    throw UpperTriangularError("A is upper triangular modulo a prime of N (lower-left entry " +
                               std::to_string(A.c) + ", N = " + std::to_string(N) + ")");
  HeckeFrame f;
  f.A = A;
  f.N = N;
  f.beta = mul_mod(sub_mod(A.a, A.d, N), inverse_mod(2 * A.c, N), N);
  f.h = TorusMatrix::nb(-f.beta, N) * A * TorusMatrix::nb(f.beta, N);
  if (f.h.a != f.h.d) throw std::logic_error("normalize_to_torus: diagonal entries differ");
  f.D = mul_mod(f.h.b, inverse_mod(f.h.c, N), N);
  for (Int p : prime_factors(N)) f.classes.emplace_back(p, classify(f.D, p));
  return f;
}

// ---------------------------------------------------------------------------
// Torus

HeckeTorus::HeckeTorus(Int D, Int M) : D_(reduce(D, M)), M_(M) {
  const auto factors = crt_split(M);
  if (factors.size() != 1 || factors[0].p == 2)
    throw std::invalid_argument("HeckeTorus needs an odd prime-power modulus");
  const auto& mod = factors[0];
  for (Int b = 0; b < M; ++b) {
    const Int rhs = add_mod(1, mul_mod(D_, mul_mod(b, b, M), M), M);
    for (Int a : hensel_sqrt(rhs, mod).enumerate()) points_.push_back({a, b});
  }
  std::sort(points_.begin(), points_.end());
  generator_ = find_generator<TorusPoint>(
      points_, TorusPoint{1 % M, 0}, [this](const TorusPoint& x, const TorusPoint& y) { return multiply(x, y); });
  TorusPoint x{1 % M, 0};
  for (Int e = 0; e < size(); ++e) {
    log_.emplace(x.a * M_ + x.b, e);
    x = multiply(x, generator_);
  }
}

TorusPoint HeckeTorus::multiply(const TorusPoint& x, const TorusPoint& y) const {
  return {add_mod(mul_mod(x.a, y.a, M_), mul_mod(D_, mul_mod(x.b, y.b, M_), M_), M_),
          add_mod(mul_mod(x.a, y.b, M_), mul_mod(x.b, y.a, M_), M_)};
}

TorusPoint HeckeTorus::power(const TorusPoint& x, Int e) const {
  TorusPoint result{1 % M_, 0}, base = x;
  while (e > 0) {
    if (e & 1) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return result;
}

TorusMatrix HeckeTorus::matrix(const TorusPoint& x) const {
  return TorusMatrix::make(x.a, mul_mod(x.b, D_, M_), x.b, x.a, M_);
}

bool HeckeTorus::contains(const TorusPoint& x) const {
  return sub_mod(mul_mod(x.a, x.a, M_), mul_mod(D_, mul_mod(x.b, x.b, M_), M_), M_) == 1 % M_;
}

Int HeckeTorus::log(const TorusPoint& x) const {
  const auto it = log_.find(reduce(x.a, M_) * M_ + reduce(x.b, M_));
  if (it == log_.end()) throw std::invalid_argument("HeckeTorus::log: point is not on the torus");
  return it->second;
}

HeckeTorus enumerate_torus(Int D, const PrimePowerModulus& modulus) {
  return HeckeTorus(D, modulus.M);
}

// ---------------------------------------------------------------------------
// zeta_x

namespace {

Int half_exponent_modulus(const PrimePowerModulus& N) {
  if (N.k % 2 != 0)
    throw std::invalid_argument("zeta_x needs N = p^{2k}; got exponent " + std::to_string(N.k));
  return ipow(N.p, N.k / 2);
}

}  // namespace

StateVector zeta_state(const ZetaIndex& x, const PrimePowerModulus& N) {
  const Int P = half_exponent_modulus(N);
  StateVector psi = StateVector::Zero(N.M);
  for (Int t = 0; t < P; ++t) psi(reduce(x.x2 + P * t, N.M)) = unit_root(mul_mod(x.x1, t, P), P);
  return psi;
}

ZetaImage zeta_canonical(const ZetaIndex& x, const PrimePowerModulus& N) {
  const Int P = half_exponent_modulus(N);
  const Int y1 = reduce(x.x1, N.M), y2 = reduce(x.x2, N.M);
  const Int m = y2 / P;
  // zeta_{(x1, x2 + P m)} = e(-x1 m / P) zeta_{(x1, x2)}
  return {{y1 % P, y2 % P}, reduce(-mul_mod(mul_mod(y1, m, N.M), P, N.M), N.M)};
}

ZetaImage zeta_action(const TorusMatrix& B, const ZetaIndex& x) {
  const Int N = B.N;
  const Int x1 = reduce(x.x1, N), x2 = reduce(x.x2, N);
  const auto [y1, y2] = B.apply(x1, x2);
  const Int r = inverse_mod(2, N);
  return {{y1, y2}, mul_mod(r, sub_mod(mul_mod(y1, y2, N), mul_mod(x1, x2, N), N), N)};
}

Int norm_form(const ZetaIndex& x, Int D, Int m) {
  return sub_mod(mul_mod(x.x1, x.x1, m), mul_mod(reduce(D, m), mul_mod(x.x2, x.x2, m), m), m);
}

std::vector<ZetaIndex> vc_members(Int C, Int D, const PrimePowerModulus& modulus) {
  const Int M = modulus.M;
  const Int target = reduce(-C, M);
  std::vector<ZetaIndex> out;
  for (Int x1 = 0; x1 < M; ++x1)
    for (Int x2 = 0; x2 < M; ++x2)
      if (norm_form({x1, x2}, D, M) == target) out.push_back({x1, x2});
  return out;
}

Int vc_dimension(Int C, Int D, const PrimePowerModulus& modulus) {
  return static_cast<Int>(vc_members(C, D, modulus).size());
}

Int vc_dimension_closed_form(Int C, Int D, const PrimePowerModulus& modulus) {
  const Int p = modulus.p;
  if (C % p == 0 || D % p == 0)
    throw std::domain_error("closed-form dim V_C needs p to divide neither C nor D");
  return modulus.M - jacobi_symbol(D, p) * (modulus.M / p);
}

// ---------------------------------------------------------------------------
// Eigenbasis

const char* to_string(VpmTag t) {
  switch (t) {
    case VpmTag::Plus: return "plus";
    case VpmTag::Minus: return "minus";
    case VpmTag::None: return "none";
  }
  return "?";
}

namespace {

// num/den reduced into [-1/2, 1/2) with den > 0 and gcd 1.
std::pair<Int, Int> centered_fraction(Int num, Int den) {
  num = reduce(num, den);
  if (2 * num >= den) num -= den;
  const Int g = gcd(num, den);
  return {num / g, den / g};
}

bool fraction_less(Int an, Int ad, Int bn, Int bd) {
  return static_cast<__int128>(an) * bd < static_cast<__int128>(bn) * ad;
}

void finish_record(EigenRecord& rec) {
  fix_global_phase(rec.vector);
  rec.sup_norm = sup_norm(rec.vector);
  rec.entropy = shannon_entropy(rec.vector);
}

void sort_records(std::vector<EigenRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const EigenRecord& x, const EigenRecord& y) {
    if (x.phase_num * y.phase_den != y.phase_num * x.phase_den)
      return fraction_less(x.phase_num, x.phase_den, y.phase_num, y.phase_den);
    if (x.C != y.C) return x.C < y.C;
    if (x.C_tilde != y.C_tilde) return x.C_tilde < y.C_tilde;
    return x.orbit_rep < y.orbit_rep;
  });
}

int min_valuation(const ZetaIndex& x, Int p, int cap) {
  int v = cap;
  if (x.x1 != 0) v = std::min(v, valuation(x.x1, p));
  if (x.x2 != 0) v = std::min(v, valuation(x.x2, p));
  return v;
}

struct Cycle {
  std::vector<ZetaIndex> points;
  std::vector<Int> steps;  // U(h0) zeta_{x_m} = e(steps[m] / N) zeta_{x_{m+1}}
  Int total = 0;           // sum of steps modulo N
};

}  // namespace

Eigenbasis eigenbasis_square(const HeckeFrame& frame, const PrimePowerModulus& Nmod, int jobs) {
  if (frame.N != Nmod.M) throw std::invalid_argument("frame modulus does not match N");
  const Int P = half_exponent_modulus(Nmod);
  const Int N = Nmod.M, p = Nmod.p;
  const int K = Nmod.k / 2;

  Eigenbasis basis{frame, Nmod, HeckeTorus(frame.D, N), {}, "square", 0.0};
  const TorusMatrix h0 = basis.torus.matrix(basis.torus.generator());

  // Orbits of the generator on canonical indices, with exact step phases.
  std::vector<Cycle> cycles;
  std::vector<char> seen(static_cast<std::size_t>(P * P), 0);
  for (Int x1 = 0; x1 < P; ++x1) {
    for (Int x2 = 0; x2 < P; ++x2) {
      if (seen[x1 * P + x2]) continue;
      Cycle c;
      ZetaIndex x{x1, x2};
      do {
        seen[x.x1 * P + x.x2] = 1;
        const ZetaImage moved = zeta_action(h0, x);
        const ZetaImage canon = zeta_canonical(moved.x, Nmod);
        c.points.push_back(x);
        c.steps.push_back(add_mod(moved.phase, canon.phase, N));
        c.total = add_mod(c.total, c.steps.back(), N);
        x = canon.x;
      } while (!(x.x1 == x1 && x.x2 == x2));
      cycles.push_back(std::move(c));
    }
  }

  struct Slot {
    std::size_t cycle;
    Int j;
  };
  std::vector<Slot> slots;
  for (std::size_t ci = 0; ci < cycles.size(); ++ci)
    for (Int j = 0; j < static_cast<Int>(cycles[ci].points.size()); ++j) slots.push_back({ci, j});
  if (static_cast<Int>(slots.size()) != N) throw std::logic_error("orbit decomposition is incomplete");

  const RootTable rootsP(P);
  const RootTable rootsN(N);
  const Int r = inverse_mod(2, N);
  const Int rbeta = mul_mod(r, frame.beta, N);
  basis.records.resize(slots.size());

  parallel_for(static_cast<Int>(slots.size()), jobs, [&](Int si) {
    const Cycle& c = cycles[slots[si].cycle];
    const Int L = static_cast<Int>(c.points.size());
    const Int j = slots[si].j;
    const Int den = N * L;
    const Int num = c.total + j * N;  // eigenvalue e(num / (N L))

    EigenRecord& rec = basis.records[si];
    rec.N = N;
    rec.p = p;
    rec.k = Nmod.k;
    rec.orbit_rep = c.points.front();
    rec.orbit_length = L;
    rec.C = reduce(-norm_form(rec.orbit_rep, frame.D, P), P);
    rec.oldform_level = min_valuation(rec.orbit_rep, p, K);
    std::tie(rec.phase_num, rec.phase_den) = centered_fraction(num, den);
    rec.eigenphase = 2.0 * std::numbers::pi * static_cast<double>(rec.phase_num) / static_cast<double>(rec.phase_den);

    // c_{m+1} = c_m e(steps[m] / N) / lambda
    StateVector v = StateVector::Zero(N);
    const double scale = std::sqrt(static_cast<double>(P) / static_cast<double>(L));
    Int partial = 0;  // sum_{i<m} steps[i] mod N
    for (Int m = 0; m < L; ++m) {
      const Int expo = reduce(static_cast<Int>((static_cast<__int128>(L) * partial - static_cast<__int128>(m) * num) % den), den);
      const Complex coeff = scale * unit_root(expo, den);
      const ZetaIndex& x = c.points[m];
      for (Int t = 0; t < P; ++t) v(x.x2 + P * t) += coeff * rootsP.at_reduced(mul_mod(x.x1, t, P));
      partial = add_mod(partial, c.steps[m], N);
    }
    // Carry the torus eigenvector to the Hecke eigenvector of A.
    for (Int y = 0; y < N; ++y) v(y) *= rootsN.at_reduced(mul_mod(rbeta, mul_mod(y, y, N), N));
    rec.vector = std::move(v);
    finish_record(rec);
  });

  for (auto& rec : basis.records) rec.C_tilde = c_tilde_lift(basis, rec, K / 2);
  if (frame.classification(p) == PrimeClass::Split) vpm_split(basis);
  sort_records(basis.records);
  return basis;
}

Eigenbasis eigenbasis_general(const HeckeFrame& frame, const PrimePowerModulus& Nmod, int jobs) {
  (void)jobs;
  if (frame.N != Nmod.M) throw std::invalid_argument("frame modulus does not match N");
  const Int N = Nmod.M;
  Eigenbasis basis{frame, Nmod, HeckeTorus(frame.D, N), {}, "general", 0.0};
  const Int ord = basis.torus.size();
  const auto U = quantize(basis.hecke_matrix(basis.torus.generator()), Nmod);
  const OperatorMatrix M = U.dense(std::max<Int>(N, kDenseLimit));

  // M^ord must be a scalar; exactly when N is small, on a probe vector otherwise.
  Complex mu;
  if (N <= kDenseLimit) {
    OperatorMatrix result = OperatorMatrix::Identity(N, N), base = M;
    for (Int e = ord; e > 0; e >>= 1) {
      if (e & 1) result = result * base;
      if (e > 1) base = base * base;
    }
    mu = result(0, 0);
    basis.scalar_defect = (result - mu * OperatorMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
  } else {
    std::mt19937_64 gen(N);
    std::normal_distribution<double> g;
    StateVector v(N);
    for (Int i = 0; i < N; ++i) v(i) = Complex(g(gen), g(gen));
    StateVector w = v;
    for (Int e = 0; e < ord; ++e) w = M * w;
    mu = v.dot(w) / v.squaredNorm();
    basis.scalar_defect = (w - mu * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
  }
  if (basis.scalar_defect > 1e-8)
    throw std::runtime_error("representation defect: U(h0)^ord is not scalar (deviation " +
                             std::to_string(basis.scalar_defect) + ")");

  const double twopi = 2.0 * std::numbers::pi;
  const OperatorMatrix Mt = std::polar(1.0, -std::arg(mu) / static_cast<double>(ord)) * M;

  // Eigenvalues of Mt are e(j/ord). Shifting by half a step before taking the
  // Hermitian part keeps distinct characters at distinct real eigenvalues.
  const Complex shift = std::polar(1.0, -std::numbers::pi / (2.0 * static_cast<double>(ord)));
  const OperatorMatrix H = 0.5 * (shift * Mt + std::conj(shift) * Mt.adjoint());
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(H);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  const OperatorMatrix& V = solver.eigenvectors();

  basis.records.resize(N);
  const double root_n = std::sqrt(static_cast<double>(N));
  for (Int i = 0; i < N; ++i) {
    EigenRecord& rec = basis.records[i];
    const StateVector col = V.col(i);
    const Complex rho = col.dot(Mt * col);
    const Int j = reduce(static_cast<Int>(std::llround(std::arg(rho) / twopi * static_cast<double>(ord))), ord);
    rec.N = N;
    rec.p = Nmod.p;
    rec.k = Nmod.k;
    std::tie(rec.phase_num, rec.phase_den) = centered_fraction(j, ord);
    rec.eigenphase = twopi * static_cast<double>(rec.phase_num) / static_cast<double>(rec.phase_den);
    rec.vector = root_n * col;
    rec.oldform_level = oldform_level(rec.vector, Nmod);
    rec.orbit_rep = {i, 0};
    rec.orbit_length = 1;
    finish_record(rec);
  }
  sort_records(basis.records);
  return basis;
}

Eigenbasis compute_eigenbasis(const HeckeFrame& frame, const PrimePowerModulus& N, int jobs) {
  return N.k % 2 == 0 ? eigenbasis_square(frame, N, jobs) : eigenbasis_general(frame, N, jobs);
}

void vpm_split(Eigenbasis& basis) {
  const Int p = basis.modulus.p;
  if (basis.frame.classification(p) != PrimeClass::Split)
    throw std::domain_error("vpm_split needs D to be a nonzero square modulo p");
  if (basis.path != "square") throw std::domain_error("vpm_split needs the zeta_x eigenbasis");
  const Int root = hensel_sqrt(basis.frame.D, PrimePowerModulus::make(p, 1)).x0;
  for (auto& rec : basis.records) {
    rec.vpm_tag = VpmTag::None;
    if (rec.C % p != 0 || !rec.is_new_form()) continue;
    const auto& x = rec.orbit_rep;
    if (reduce(x.x1 - root * x.x2, p) == 0) rec.vpm_tag = VpmTag::Plus;
    else if (reduce(x.x1 + root * x.x2, p) == 0) rec.vpm_tag = VpmTag::Minus;
  }
}

int oldform_level(const StateVector& psi, const PrimePowerModulus& N, double tol) {
  for (int m = N.k / 2; m > 0; --m)
    if (schwartz_membership(psi, N, N.k - m, m, tol)) return m;
  return 0;
}

std::pair<Int, Int> record_eigenvalue(const Eigenbasis& basis, const EigenRecord& rec,
                                      const TorusPoint& x) {
  const Int e = basis.torus.log(x);
  const Int num = static_cast<Int>((static_cast<__int128>(e) * rec.phase_num) % rec.phase_den);
  const Int n = reduce(num, rec.phase_den);
  const Int g = gcd(n, rec.phase_den);
  return {n / g, rec.phase_den / g};
}

Int c_tilde_lift(const Eigenbasis& basis, const EigenRecord& rec, int s) {
  const int K = basis.modulus.k / 2;
  if (basis.path != "square" || 2 * s > K || s < 0)
    throw std::domain_error("C~ lift needs N = p^{2k} and 0 <= 2s <= k");
  const Int N = basis.modulus.M, p = basis.modulus.p;
  const Int q = ipow(p, K - s);
  const Int r = inverse_mod(2, N);
  const TorusPoint B{add_mod(1, mul_mod(r, mul_mod(basis.frame.D, mul_mod(q, q, N), N), N), N), q};
  const auto [num, den] = record_eigenvalue(basis, rec, B);
  const Int Q = ipow(p, K + s);
  const __int128 scaled = static_cast<__int128>(num) * Q;
  if (scaled % den != 0)
    throw std::logic_error("eigenvalue at the lift element is not a p^{k+s}-th root of unity");
  return reduce(2 * static_cast<Int>(scaled / den), Q);
}

// ---------------------------------------------------------------------------
// Closed-form point values

const char* to_string(SatsPrediction::Kind k) {
  switch (k) {
    case SatsPrediction::Kind::Vanishing: return "vanishing";
    case SatsPrediction::Kind::Sats1: return "sats1";
    case SatsPrediction::Kind::Sats2: return "sats2";
  }
  return "?";
}

namespace {

struct SatsSetting {
  Int p;
  int K;
  Int P;
  Int D;
  double norm;
};

SatsSetting sats_setting(const Eigenbasis& basis, const EigenRecord& rec, const char* who) {
  if (basis.path != "square")
    throw SatsCaseError(std::string(who) + ": needs N = p^{2k} and the zeta_x eigenbasis");
  const Int p = basis.modulus.p;
  if (p <= 3) throw SatsCaseError(std::string(who) + ": needs p > 3");
  if (rec.C % p == 0) throw SatsCaseError(std::string(who) + ": p divides C");
  if (basis.frame.D % p == 0) throw SatsCaseError(std::string(who) + ": p divides D (ramified)");
  const int K = basis.modulus.k / 2;
  const double leg = jacobi_symbol(basis.frame.D, p);
  return {p, K, ipow(p, K), basis.frame.D, 1.0 / std::sqrt(1.0 - leg / static_cast<double>(p))};
}

// (value - lower terms) / p^k, checking divisibility.
Int divide_exact(Int value, Int P, Int Q) {
  value = reduce(value, Q);
  if (value % P != 0) throw std::logic_error("phase polynomial: constant term is not divisible by p^k");
  return value / P;
}

}  // namespace

SatsPrediction sats1_predict(const Eigenbasis& basis, const EigenRecord& rec, Int b) {
  const SatsSetting st = sats_setting(basis, rec, "sats1");
  const auto mod = PrimePowerModulus{st.p, st.K, st.P};
  const auto roots = hensel_sqrt(sub_mod(mul_mod(st.D % st.P, mul_mod(b, b, st.P), st.P), rec.C, st.P), mod);
  if (roots.kind != SqrtSolutionSet::Kind::UnitPair && roots.kind != SqrtSolutionSet::Kind::CosetFamily)
    throw SatsCaseError("sats1: -C + D b^2 has no unit-pair or coset root family");

  SatsPrediction out;
  out.kind = SatsPrediction::Kind::Sats1;
  out.s = roots.s;
  out.x0 = roots.x0;
  const int s = roots.s;
  if (s == 0) {
    out.lo = 0.0;
    out.hi = 2.0 * st.norm;
    return out;
  }
  const Int Q = ipow(st.p, st.K + s);
  const Int ps = ipow(st.p, s);
  const Int rQ = inverse_mod(2, Q), i3Q = inverse_mod(3, Q);
  const Int D = reduce(st.D, Q), bq = reduce(b, Q), x0 = roots.x0;
  const Int Db2 = mul_mod(D, mul_mod(bq, bq, Q), Q);
  const Int ct = c_tilde_lift(basis, rec, s);

  // Theta p^k = -x0^2 p^{2s} - C~ + D b^2 - p^{2(k-s)} 3^{-1} r D^2 b^2  (mod p^{k+s})
  Int rhs = reduce(-mul_mod(mul_mod(x0, x0, Q), ipow(st.p, 2 * s), Q), Q);
  rhs = sub_mod(rhs, ct, Q);
  rhs = add_mod(rhs, Db2, Q);
  rhs = sub_mod(rhs, mul_mod(ipow(st.p, 2 * (st.K - s)) % Q, mul_mod(mul_mod(i3Q, rQ, Q), mul_mod(Db2, D, Q), Q), Q), Q);
  const Int theta = divide_exact(rhs, st.P, Q) % ps;
  out.theta = theta;

  // q_pm(z) = r (Theta z -+ x0 D b z^2 - p^{k-2s} 3^{-1} D^2 b^2 z^3)  (mod p^s)
  const Int r = inverse_mod(2, ps), i3 = inverse_mod(3, ps);
  const Int a1 = mul_mod(r, theta, ps);
  const Int a2 = mul_mod(r, mul_mod(x0 % ps, mul_mod(D % ps, bq % ps, ps), ps), ps);
  const Int a3 = reduce(-mul_mod(r, mul_mod(ipow(st.p, st.K - 2 * s) % ps, mul_mod(i3, mul_mod(Db2 % ps, D % ps, ps), ps), ps), ps), ps);
  const double splus = std::abs(exp_sum_direct(CubicPoly::make(a3, -a2, a1, 0, st.p, s)));
  const double sminus = std::abs(exp_sum_direct(CubicPoly::make(a3, a2, a1, 0, st.p, s)));
  out.lo = std::abs(splus - sminus) * st.norm;
  out.hi = (splus + sminus) * st.norm;
  return out;
}

SatsPrediction sats2_predict(const Eigenbasis& basis, const EigenRecord& rec, Int b) {
  const SatsSetting st = sats_setting(basis, rec, "sats2");
  if (sub_mod(mul_mod(st.D % st.P, mul_mod(b, b, st.P), st.P), rec.C, st.P) != 0)
    throw SatsCaseError("sats2: -C + D b^2 is not 0 modulo p^k");
  SatsPrediction out;
  out.kind = SatsPrediction::Kind::Sats2;
  const int m = st.K / 2;
  out.s = m;
  if (m == 0) {
    out.lo = out.hi = st.norm;
    return out;
  }
  const Int Q = ipow(st.p, st.K + m);
  const Int pm = ipow(st.p, m);
  const Int rQ = inverse_mod(2, Q), i3Q = inverse_mod(3, Q);
  const Int D = reduce(st.D, Q), bq = reduce(b, Q);
  const Int ct = c_tilde_lift(basis, rec, m);
  const Int CD = mul_mod(ct, D, Q);

  // Theta p^k = -C~ + D b^2 - p^{k + (k - 2[k/2])} 3^{-1} r C D  (mod p^{[3k/2]})
  Int rhs = sub_mod(mul_mod(D, mul_mod(bq, bq, Q), Q), ct, Q);
  rhs = sub_mod(rhs, mul_mod(ipow(st.p, 2 * st.K - 2 * m) % Q, mul_mod(mul_mod(i3Q, rQ, Q), CD, Q), Q), Q);
  const Int theta = divide_exact(rhs, st.P, Q) % pm;
  out.theta = theta;

  // q(z) = r (Theta z - p^{k-2[k/2]} 3^{-1} C D z^3)  (mod p^{[k/2]})
  const Int r = inverse_mod(2, pm), i3 = inverse_mod(3, pm);
  const Int a1 = mul_mod(r, theta, pm);
  const Int a3 = reduce(-mul_mod(r, mul_mod(ipow(st.p, st.K - 2 * m) % pm, mul_mod(i3, CD % pm, pm), pm), pm), pm);
  out.lo = out.hi = std::abs(exp_sum_direct(CubicPoly::make(a3, 0, a1, 0, st.p, m))) * st.norm;
  return out;
}

SatsPrediction predict_value(const Eigenbasis& basis, const EigenRecord& rec, Int b) {
  const SatsSetting st = sats_setting(basis, rec, "predict_value");
  const auto mod = PrimePowerModulus{st.p, st.K, st.P};
  const auto roots = hensel_sqrt(sub_mod(mul_mod(st.D % st.P, mul_mod(b, b, st.P), st.P), rec.C, st.P), mod);
  switch (roots.kind) {
    case SqrtSolutionSet::Kind::Empty:
      return SatsPrediction{};
    case SqrtSolutionSet::Kind::ZeroFamily:
      return sats2_predict(basis, rec, b);
    default:
      return sats1_predict(basis, rec, b);
  }
}

// ---------------------------------------------------------------------------
// Lifting and composite moduli

std::vector<StateVector> lift_eigenvectors(const Eigenbasis& lower, const PrimePowerModulus& N, int m) {
  std::vector<StateVector> out;
  out.reserve(lower.records.size());
  for (const auto& rec : lower.records) out.push_back(t_m_inverse(rec.vector, N, m));
  return out;
}

std::vector<TensorEigenvector> tensor_eigenbasis(const std::vector<Eigenbasis>& factors, Int N) {
  Int product = 1;
  for (const auto& f : factors) product *= f.modulus.M;
  if (product != N) throw std::invalid_argument("tensor_eigenbasis: factor moduli do not multiply to N");
  std::vector<TensorEigenvector> out;
  out.reserve(static_cast<std::size_t>(N));
  std::vector<std::size_t> idx(factors.size(), 0);
  for (;;) {
    TensorEigenvector t;
    t.factor_index = idx;
    t.vector = StateVector::Ones(N);
    for (std::size_t j = 0; j < factors.size(); ++j) {
      const StateVector& v = factors[j].records[idx[j]].vector;
      const Int Mj = factors[j].modulus.M;
      for (Int x = 0; x < N; ++x) t.vector(x) *= v(x % Mj);
    }
    t.sup_norm = sup_norm(t.vector);
    out.push_back(std::move(t));
    std::size_t j = factors.size();
    while (j > 0) {
      --j;
      if (++idx[j] < factors[j].records.size()) break;
      idx[j] = 0;
      if (j == 0) return out;
    }
    if (factors.empty()) return out;
  }
}

}  // namespace catmap
