#include <doctest.h>

#include <algorithm>
#include <set>

#include "catmap/residue.hpp"
#include "support.hpp"

using namespace catmap;

namespace {

// Independent oracle: scan all candidates.
Int scan_inverse(Int a, Int M) {
  for (Int b = 0; b < M; ++b)
    if ((a * b) % M == 1 % M) return b;
  return -1;
}

std::vector<Int> brute_sqrt(Int a, Int M) {
  std::vector<Int> out;
  for (Int x = 0; x < M; ++x)
    if ((x * x - a) % M == 0) out.push_back(x);
  return out;
}

int brute_legendre(Int a, Int p) {
  a = reduce(a, p);
  if (a == 0) return 0;
  for (Int x = 1; x < p; ++x)
    if ((x * x) % p == a) return 1;
  return -1;
}

}  // namespace

TEST_CASE("mod_inverse examples") {
  CHECK(mod_inverse(Residue(2, 25)).value() == 13);
  CHECK(mod_inverse(Residue(1, 343)).value() == 1);
  CHECK(mod_inverse(Residue(3, 625)).value() == scan_inverse(3, 625));
  CHECK(mod_inverse(Residue(3, 625)).value() == 417);
}

TEST_CASE("mod_inverse rejects zero divisors and reports the gcd") {
  try {
    (void)mod_inverse(Residue(10, 25));
    FAIL("expected NonUnitError");
  } catch (const NonUnitError& e) {
    CHECK(e.gcd() == 5);
  }
}

TEST_CASE("mod_inverse is exhaustive for prime powers up to 7^3") {
  for (Int p : {3, 5, 7}) {
    for (int k = 1; ipow(p, k) <= 343; ++k) {
      const Int M = ipow(p, k);
      for (Int a = 1; a < M; ++a) {
        if (a % p == 0) continue;
        REQUIRE(mul_mod(mod_inverse(Residue(a, M)).value(), a, M) == 1);
      }
    }
  }
}

TEST_CASE("jacobi symbol") {
  CHECK(jacobi_symbol(1, 5) == 1);
  CHECK(jacobi_symbol(2, 5) == -1);
  CHECK(jacobi_symbol(2, 7) == brute_legendre(2, 7));
  CHECK(jacobi_symbol(2, 7) == 1);
  CHECK(jacobi_symbol(10, 5) == 0);
  for (Int p : {5, 7, 11, 13}) {
    for (Int a = -p; a < 2 * p; ++a) REQUIRE(jacobi_symbol(a, p) == brute_legendre(a, p));
    for (Int a = 1; a < p; ++a)
      for (Int b = 1; b < p; ++b)
        REQUIRE(jacobi_symbol(a * b, p) == jacobi_symbol(a, p) * jacobi_symbol(b, p));
  }
}

TEST_CASE("hensel_sqrt examples") {
  const auto m25 = PrimePowerModulus::make(5, 2);
  auto s = hensel_sqrt(6, m25);
  CHECK(s.kind == SqrtSolutionSet::Kind::UnitPair);
  CHECK(s.enumerate() == brute_sqrt(6, 25));
  CHECK(s.enumerate() == std::vector<Int>{9, 16});

  s = hensel_sqrt(100, PrimePowerModulus::make(5, 3));
  CHECK(s.kind == SqrtSolutionSet::Kind::CosetFamily);
  CHECK(s.x0 == 2);
  CHECK(s.s == 1);
  CHECK(s.coset_modulus() == 5);
  CHECK(s.enumerate() == brute_sqrt(100, 125));

  s = hensel_sqrt(0, PrimePowerModulus::make(5, 4));
  CHECK(s.kind == SqrtSolutionSet::Kind::ZeroFamily);
  CHECK(s.coset_modulus() == 25);
  CHECK(s.enumerate() == brute_sqrt(0, 625));

  CHECK(hensel_sqrt(5, m25).kind == SqrtSolutionSet::Kind::Empty);
  CHECK(hensel_sqrt(2, m25).kind == SqrtSolutionSet::Kind::Empty);
}

TEST_CASE("hensel_sqrt matches brute force exhaustively up to 5^4") {
  for (Int p : {3, 5, 7}) {
    for (int k = 1; ipow(p, k) <= 625; ++k) {
      const auto mod = PrimePowerModulus::make(p, k);
      for (Int a = 0; a < mod.M; ++a) {
        const auto set = hensel_sqrt(a, mod);
        const auto brute = brute_sqrt(a, mod.M);
        REQUIRE(set.enumerate() == brute);
        REQUIRE(set.size() == brute.size());
        for (Int x = 0; x < mod.M; ++x)
          REQUIRE(set.contains(x) == std::binary_search(brute.begin(), brute.end(), x));
      }
    }
  }
}

TEST_CASE("crt split and combine") {
  auto f = crt_split(45);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == PrimePowerModulus{3, 2, 9});
  CHECK(f[1] == PrimePowerModulus{5, 1, 5});
  f = crt_split(625);
  REQUIRE(f.size() == 1);
  CHECK(f[0] == PrimePowerModulus{5, 4, 625});

  Int scanned = -1;
  for (Int x = 0; x < 45; ++x)
    if (x % 9 == 4 && x % 5 == 3) scanned = x;
  const Residue parts[] = {Residue(4, 9), Residue(3, 5)};
  CHECK(crt_combine(parts).value() == scanned);
  CHECK(crt_combine(parts).value() == 13);
  CHECK(crt_combine(parts).modulus() == 45);
}

TEST_CASE("crt_combine inverts crt_split on sampled N") {
  for (int trial = 0; trial < 400; ++trial) {
    const Int N = testing::uniform(2, 10000);
    const Int x = testing::uniform(0, N - 1);
    std::vector<Residue> parts;
    Int product = 1;
    for (const auto& f : crt_split(N)) {
      parts.emplace_back(x, f.M);
      product *= f.M;
    }
    REQUIRE(product == N);
    const Residue back = crt_combine(parts);
    REQUIRE(back.value() == x);
    REQUIRE(back.modulus() == N);
  }
}

TEST_CASE("orders and generators") {
  CHECK(multiplicative_order(Residue(2, 5)) == 4);
  CHECK(multiplicative_order(Residue(1, 25)) == 1);
  const auto u = units(25);
  const Int g = find_generator<Int>(u, 1, [](Int x, Int y) { return mul_mod(x, y, 25); });
  CHECK(g == 2);
  CHECK(pow_mod(2, 10, 25) != 1);
  CHECK(pow_mod(2, 4, 25) != 1);
  CHECK(multiplicative_order(Residue(g, 25)) == 20);
  // Z_8^x is not cyclic.
  const auto u8 = units(8);
  CHECK_THROWS_AS(find_generator<Int>(u8, 1, [](Int x, Int y) { return mul_mod(x, y, 8); }),
                  std::runtime_error);
  for (Int a : units(343)) REQUIRE(343 * 6 / 7 % multiplicative_order(Residue(a, 343)) == 0);
}
