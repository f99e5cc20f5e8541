#include "catmap/residue.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace catmap {

NonUnitError::NonUnitError(Int value, Int modulus, Int g)
    : std::domain_error("residue " + std::to_string(value) + " is not a unit mod " +
                        std::to_string(modulus) + " (gcd " + std::to_string(g) + ")"),
      gcd_(g) {}

Int pow_mod(Int base, Int exp, Int m) {
  if (m == 1) return 0;
  Int result = 1;
  base = reduce(base, m);
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

Int ipow(Int base, int exp) {
  Int result = 1;
  for (int i = 0; i < exp; ++i) result *= base;
  return result;
}

Int gcd(Int a, Int b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int valuation(Int a, Int p) {
  if (a == 0) throw std::invalid_argument("valuation of zero");
  int v = 0;
  if (a < 0) a = -a;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

Int inverse_mod(Int a, Int m) {
  a = reduce(a, m);
  // Extended Euclid on (a, m).
  Int old_r = a, r = m, old_s = 1, s = 0;
  while (r != 0) {
    Int q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
  }
  if (old_r != 1) throw NonUnitError(a, m, old_r);
  return reduce(old_s, m);
}

PrimePowerModulus PrimePowerModulus::make(Int p, int k) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  if (k < 1) throw std::invalid_argument("prime-power exponent must be >= 1");
  return PrimePowerModulus{p, k, ipow(p, k)};
}

Residue::Residue(Int value, Int modulus) : value_(reduce(value, modulus)), modulus_(modulus) {
  if (modulus < 1) throw std::invalid_argument("modulus must be positive");
}

void Residue::check_same(const Residue& o) const {
  if (o.modulus_ != modulus_) throw std::invalid_argument("residues with different moduli");
}

Residue Residue::operator+(const Residue& o) const {
  check_same(o);
  return Residue(add_mod(value_, o.value_, modulus_), modulus_);
}

Residue Residue::operator-(const Residue& o) const {
  check_same(o);
  return Residue(sub_mod(value_, o.value_, modulus_), modulus_);
}

Residue Residue::operator*(const Residue& o) const {
  check_same(o);
  return Residue(mul_mod(value_, o.value_, modulus_), modulus_);
}

Residue mod_inverse(const Residue& a) {
  return Residue(inverse_mod(a.value(), a.modulus()), a.modulus());
}

int jacobi_symbol(Int a, Int n) {
  if (n <= 0 || n % 2 == 0) throw std::invalid_argument("jacobi_symbol needs odd positive n");
  a = reduce(a, n);
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      Int r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

std::optional<Int> sqrt_mod_prime(Int a, Int p) {
  a = reduce(a, p);
  if (a == 0) return 0;
  if (p == 2) return a;
  if (jacobi_symbol(a, p) != 1) return std::nullopt;
  // Tonelli-Shanks: p - 1 = q 2^s.
  Int q = p - 1;
  int s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  Int z = 2;
  while (jacobi_symbol(z, p) != -1) ++z;
  Int m = s;
  Int c = pow_mod(z, q, p);
  Int t = pow_mod(a, q, p);
  Int r = pow_mod(a, (q + 1) / 2, p);
  while (t != 1) {
    Int i = 0, t2 = t;
    while (t2 != 1) {
      t2 = mul_mod(t2, t2, p);
      ++i;
    }
    Int b = c;
    for (Int j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, p);
    m = i;
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    r = mul_mod(r, b, p);
  }
  return std::min(r, p - r);
}

namespace {

// Lifts a unit root x of x^2 = a (mod p) to a root modulo p^e by Newton steps.
Int hensel_lift(Int x, Int a, Int p, int e) {
  Int mod = p;
  for (int j = 1; j < e; ++j) {
    mod *= p;
    Int fx = sub_mod(mul_mod(x, x, mod), a, mod);
    Int inv = inverse_mod(2 * x, mod);
    x = sub_mod(x, mul_mod(fx, inv, mod), mod);
  }
  return reduce(x, mod);
}

}  // namespace

SqrtSolutionSet hensel_sqrt(Int a, const PrimePowerModulus& modulus) {
  const Int p = modulus.p;
  const int k = modulus.k;
  if (p == 2) throw std::invalid_argument("hensel_sqrt requires an odd prime");
  SqrtSolutionSet set;
  set.modulus = modulus;
  a = reduce(a, modulus.M);
  if (a == 0) {
    set.kind = SqrtSolutionSet::Kind::ZeroFamily;
    return set;
  }
  const int v = valuation(a, p);
  if (v % 2 == 1) return set;
  const int s = v / 2;
  const Int reduced_mod = ipow(p, k - 2 * s);
  const Int unit_part = reduce(a / ipow(p, v), reduced_mod);
  auto root = sqrt_mod_prime(unit_part, p);
  if (!root) return set;
  Int x0 = hensel_lift(*root, unit_part, p, k - 2 * s);
  x0 = std::min(x0, reduced_mod - x0);
  set.kind = s == 0 ? SqrtSolutionSet::Kind::UnitPair : SqrtSolutionSet::Kind::CosetFamily;
  set.x0 = x0;
  set.s = s;
  return set;
}

Int SqrtSolutionSet::coset_modulus() const {
  switch (kind) {
    case Kind::CosetFamily:
      return ipow(modulus.p, s);
    case Kind::ZeroFamily:
      return ipow(modulus.p, modulus.k / 2);
    default:
      return 1;
  }
}

bool SqrtSolutionSet::contains(Int x) const {
  const Int M = modulus.M;
  x = reduce(x, M);
  switch (kind) {
    case Kind::Empty:
      return false;
    case Kind::ZeroFamily:
      return x % ipow(modulus.p, (modulus.k + 1) / 2) == 0;
    case Kind::UnitPair:
    case Kind::CosetFamily: {
      const Int base = ipow(modulus.p, s);
      const Int step = ipow(modulus.p, modulus.k - s);
      const Int root = mul_mod(x0, base, M);
      return reduce(x - root, step) == 0 || reduce(x + root, step) == 0;
    }
  }
  return false;
}

std::vector<Int> SqrtSolutionSet::enumerate() const {
  std::vector<Int> out;
  const Int M = modulus.M;
  switch (kind) {
    case Kind::Empty:
      break;
    case Kind::ZeroFamily: {
      const Int step = ipow(modulus.p, (modulus.k + 1) / 2);
      for (Int m = 0; m < coset_modulus(); ++m) out.push_back(m * step);
      break;
    }
    case Kind::UnitPair:
    case Kind::CosetFamily: {
      const Int root = mul_mod(x0, ipow(modulus.p, s), M);
      const Int step = ipow(modulus.p, modulus.k - s);
      for (Int sign : {Int{1}, Int{-1}})
        for (Int m = 0; m < coset_modulus(); ++m) out.push_back(reduce(sign * root + m * step, M));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t SqrtSolutionSet::size() const {
  switch (kind) {
    case Kind::Empty:
      return 0;
    case Kind::ZeroFamily:
      return static_cast<std::size_t>(coset_modulus());
    default:
      return static_cast<std::size_t>(2 * coset_modulus());
  }
}

std::vector<PrimePowerModulus> crt_split(Int N) {
  if (N < 2) throw std::invalid_argument("crt_split needs N >= 2");
  std::vector<PrimePowerModulus> out;
  for (Int p = 2; p * p <= N; ++p) {
    if (N % p != 0) continue;
    int k = 0;
    while (N % p == 0) {
      N /= p;
      ++k;
    }
    out.push_back(PrimePowerModulus{p, k, ipow(p, k)});
  }
  if (N > 1) out.push_back(PrimePowerModulus{N, 1, N});
  return out;
}

Residue crt_combine(std::span<const Residue> residues) {
  Int value = 0, modulus = 1;
  for (const Residue& r : residues) {
    if (gcd(modulus, r.modulus()) != 1)
      throw std::invalid_argument("crt_combine: moduli are not coprime");
    const Int next = modulus * r.modulus();
    // value + modulus * t = r (mod r.modulus())
    const Int t = mul_mod(sub_mod(r.value(), value, r.modulus()),
                          inverse_mod(modulus, r.modulus()), r.modulus());
    value = reduce(value + modulus * t, next);
    modulus = next;
  }
  return Residue(value, modulus);
}

std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    out.push_back(p);
    while (n % p == 0) n /= p;
  }
  if (n > 1) out.push_back(n);
  return out;
}

namespace {

Int euler_phi(Int n) {
  Int result = n;
  for (Int p : prime_factors(n)) result = result / p * (p - 1);
  return result;
}

}  // namespace

Int multiplicative_order(const Residue& a) {
  if (!a.is_unit()) throw NonUnitError(a.value(), a.modulus(), gcd(a.value(), a.modulus()));
  const Int m = a.modulus();
  return element_order(a.value(), euler_phi(m), Int{1 % m},
                       [m](Int x, Int y) { return mul_mod(x, y, m); });
}

std::vector<Int> units(Int M) {
  std::vector<Int> out;
  for (Int x = 1; x < M; ++x)
    if (gcd(x, M) == 1) out.push_back(x);
  if (M == 1) out.push_back(0);
  return out;
}

}  // namespace catmap
