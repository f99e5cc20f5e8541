#pragma once

// Exact arithmetic in Z_{p^k} and Z_N.
//
// All moduli handled here are small (desk scale, M <= ~2^31), so values are
// stored in std::int64_t and products go through a 128-bit accumulator.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace catmap {

using Int = std::int64_t;

/// Raised when an operation needs a unit but receives a zero divisor.
class NonUnitError : public std::domain_error {
 public:
  NonUnitError(Int value, Int modulus, Int gcd);
  Int gcd() const { return gcd_; }

 private:
  Int gcd_;
};

// ---------------------------------------------------------------------------
// Plain integer helpers

inline Int reduce(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

inline Int mul_mod(Int a, Int b, Int m) {
  return static_cast<Int>(reduce(static_cast<Int>((static_cast<__int128>(a) * b) % m), m));
}

inline Int add_mod(Int a, Int b, Int m) { return reduce(a + b, m); }
inline Int sub_mod(Int a, Int b, Int m) { return reduce(a - b, m); }

Int pow_mod(Int base, Int exp, Int m);
Int ipow(Int base, int exp);
Int gcd(Int a, Int b);
bool is_prime(Int n);

/// p-adic valuation of a != 0.
int valuation(Int a, Int p);

/// Inverse of a modulo m; throws NonUnitError when gcd(a, m) > 1.
Int inverse_mod(Int a, Int m);

// ---------------------------------------------------------------------------

/// The modulus p^k with p prime.
struct PrimePowerModulus {
  Int p = 0;
  int k = 0;
  Int M = 1;

  /// Validates primality of p and k >= 1.
  static PrimePowerModulus make(Int p, int k);

  bool operator==(const PrimePowerModulus&) const = default;
};

/// An element of Z_M. Arithmetic is closed under the shared modulus.
class Residue {
 public:
  Residue(Int value, Int modulus);

  Int value() const { return value_; }
  Int modulus() const { return modulus_; }
  bool is_unit() const { return gcd(value_, modulus_) == 1; }

  Residue operator+(const Residue& o) const;
  Residue operator-(const Residue& o) const;
  Residue operator*(const Residue& o) const;
  Residue operator-() const { return Residue(modulus_ - value_, modulus_); }
  Residue pow(Int e) const { return Residue(pow_mod(value_, e, modulus_), modulus_); }

  bool operator==(const Residue&) const = default;

 private:
  void check_same(const Residue& o) const;

  Int value_;
  Int modulus_;
};

Residue mod_inverse(const Residue& a);

/// Legendre/Jacobi symbol (a/n) for odd n > 0.
int jacobi_symbol(Int a, Int n);

// ---------------------------------------------------------------------------
// Square roots modulo p^k

/// Complete solution set of x^2 = a (mod p^k), p odd, in structured form.
///
///   Empty        no solutions
///   UnitPair     {+x0, -x0}                      (s = 0)
///   CosetFamily  +-x0 p^s + p^{k-s} Z_{p^s}      (valuation of a is 2s, 0 < 2s < k)
///   ZeroFamily   p^{ceil(k/2)} Z_{p^{floor(k/2)}} (a = 0 mod p^k)
///
/// x0 is a unit defined modulo p^{k-2s}.
struct SqrtSolutionSet {
  enum class Kind { Empty, UnitPair, CosetFamily, ZeroFamily };

  Kind kind = Kind::Empty;
  Int x0 = 0;
  int s = 0;
  PrimePowerModulus modulus;

  /// Modulus of the free parameter: p^s for the coset family, p^{floor(k/2)}
  /// for the zero family, 1 otherwise.
  Int coset_modulus() const;
  bool contains(Int x) const;
  std::vector<Int> enumerate() const;
  std::size_t size() const;
};

SqrtSolutionSet hensel_sqrt(Int a, const PrimePowerModulus& modulus);

/// Square root of a unit residue a modulo p (Tonelli-Shanks); nullopt for non-residues.
std::optional<Int> sqrt_mod_prime(Int a, Int p);

// ---------------------------------------------------------------------------
// Chinese remainder theorem

std::vector<PrimePowerModulus> crt_split(Int N);

/// Combines residues with pairwise coprime moduli into one residue modulo their product.
Residue crt_combine(std::span<const Residue> residues);

// ---------------------------------------------------------------------------
// Orders and generators

std::vector<Int> prime_factors(Int n);

Int multiplicative_order(const Residue& a);

/// Order of g in a finite group of known size, given multiplication and identity.
template <class T, class Mul, class Eq = std::equal_to<T>>
Int element_order(const T& g, Int group_size, const T& identity, Mul mul, Eq eq = {}) {
  auto power = [&](Int e) {
    T result = identity;
    T base = g;
    while (e > 0) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  };
  Int order = group_size;
  for (Int q : prime_factors(group_size)) {
    while (order % q == 0 && eq(power(order / q), identity)) order /= q;
  }
  return order;
}

/// Scans the group elements in order and returns the first of full order.
/// Throws std::runtime_error if none exists (the enumeration is not cyclic).
template <class T, class Mul, class Eq = std::equal_to<T>>
T find_generator(std::span<const T> elements, const T& identity, Mul mul, Eq eq = {}) {
  const Int size = static_cast<Int>(elements.size());
  for (const T& g : elements) {
    if (element_order(g, size, identity, mul, eq) == size) return g;
  }
  throw std::runtime_error("find_generator: group of size " + std::to_string(size) +
                           " is not cyclic");
}

/// Units of Z_M in ascending order.
std::vector<Int> units(Int M);

}  // namespace catmap
