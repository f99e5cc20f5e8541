#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "catmap/expsum.hpp"
#include "support.hpp"

using namespace catmap;

namespace {

// Naive twin: integer polynomial value, then one cos/sin per term.
double naive_modulus(Int a3, Int a2, Int a1, Int a0, Int p, int n) {
  const Int M = ipow(p, n);
  double re = 0, im = 0;
  for (Int z = 0; z < M; ++z) {
    const __int128 v = static_cast<__int128>(a3) * z * z * z + static_cast<__int128>(a2) * z * z +
                       static_cast<__int128>(a1) * z + a0;
    const Int r = static_cast<Int>(((v % M) + M) % M);
    const double ang = 2 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(M);
    re += std::cos(ang);
    im += std::sin(ang);
  }
  return std::hypot(re, im);
}

int distinct_count(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  int n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i == 0 || v[i] - v[i - 1] > tol) ++n;
  return n;
}

}  // namespace

TEST_CASE("direct sums: small examples") {
  CHECK(exp_sum_direct(CubicPoly::make(0, 0, 0, 0, 5, 2)).real() == doctest::Approx(25.0));
  CHECK(std::abs(exp_sum_direct(CubicPoly::make(0, 0, 0, 0, 5, 2)).imag()) < 1e-12);
  CHECK(std::abs(exp_sum_direct(CubicPoly::make(0, 1, 0, 0, 5, 1))) == doctest::Approx(std::sqrt(5.0)));
  CHECK(std::abs(exp_sum_direct(CubicPoly::make(1, 0, 0, 0, 5, 2))) == doctest::Approx(5.0));
  for (Int alpha : {1, 2, 3, 4, 5, 6, 8, 48})
    CHECK(std::abs(exp_sum_direct(CubicPoly::make(alpha, 0, 0, 0, 7, 2))) == doctest::Approx(7.0));
  CHECK(exp_sum_direct(CubicPoly::make(0, 0, 0, 0, 5, 0)) == Complex(1.0));
}

TEST_CASE("direct sums agree with the naive twin") {
  auto& g = catmap::testing::rng();
  for (int trial = 0; trial < 200; ++trial) {
    const Int p = (trial % 2) ? 7 : 5;
    const int n = 1 + trial % 3;
    const Int M = ipow(p, n);
    std::uniform_int_distribution<Int> u(0, M - 1);
    const Int a3 = u(g), a2 = u(g), a1 = u(g), a0 = u(g);
    CHECK(std::abs(exp_sum_direct(CubicPoly::make(a3, a2, a1, a0, p, n))) ==
          doctest::Approx(naive_modulus(a3, a2, a1, a0, p, n)).epsilon(1e-10));
  }
}

TEST_CASE("coefficients are reduced modulo p^n") {
  const auto q = CubicPoly::make(-1, 27, 130, -3, 5, 3);
  CHECK(q.a3 == 124);
  CHECK(q.a2 == 27);
  CHECK(q.a1 == 5);
  CHECK(q.a0 == 122);
  CHECK(q.M == 125);
  CHECK(q(2) == (124 * 8 + 27 * 4 + 5 * 2 + 122) % 125);
  CHECK(q.derivative(2) == (3 * 124 * 4 + 2 * 27 * 2 + 5) % 125);
}

TEST_CASE("reduction examples") {
  const auto ex = exp_sum_reduced(CubicPoly::make(5, 1, 0, 0, 5, 3));
  CHECK(ex.route == ReductionRoute::ExaktExp);
  CHECK(ex.reduced);
  CHECK(std::abs(ex.value) == doctest::Approx(std::pow(5.0, 1.5)).epsilon(1e-12));

  // At n = 2 the single critical point z = 0 leaves |S| = p.
  CHECK(std::abs(exp_sum_reduced(CubicPoly::make(1, 0, 5, 0, 5, 2)).value) == doctest::Approx(5.0));
  for (int n = 3; n <= 4; ++n)
    for (Int t : {1, 2, 3, 4}) {
      const auto e = exp_sum_reduced(CubicPoly::make(1, 0, 5 * t, 0, 5, n));
      CHECK(e.route == ReductionRoute::Exp);
      CHECK(std::abs(e.value) < 1e-9);
      CHECK(naive_modulus(1, 0, 5 * t, 0, 5, n) < 1e-9);
    }

  const auto e2 = exp_sum_reduced(CubicPoly::make(1, 0, 25, 0, 5, 4));
  CHECK(e2.route == ReductionRoute::Exp2);
  CHECK(std::abs(e2.value) == doctest::Approx(25.0 * naive_modulus(1, 0, 1, 0, 5, 1)).epsilon(1e-12));

  const auto d = exp_sum_reduced(CubicPoly::make(5, 5, 1, 0, 5, 2));
  CHECK(d.route == ReductionRoute::Direct);
  CHECK_FALSE(d.reduced);
  CHECK(std::abs(d.value) == doctest::Approx(naive_modulus(5, 5, 1, 0, 5, 2)));
}

TEST_CASE("stationary recursion matches direct summation on every cubic, p = 5, n <= 3") {
  int mismatches = 0;
  for (int n = 1; n <= 3; ++n) {
    const Int M = ipow(5, n);
    for (Int a3 = 0; a3 < M; ++a3)
      for (Int a2 = 0; a2 < M; ++a2)
        for (Int a1 = 0; a1 < M; ++a1) {
          const auto q = CubicPoly::make(a3, a2, a1, 7, 5, n);
          if (std::abs(exp_sum_stationary(q) - exp_sum_direct(q)) > 1e-9) ++mismatches;
        }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("reduced vs direct: exhaustive in reduction scope, p = 5, n = 4") {
  const Int p = 5, M = 625;
  int checked = 0, mismatches = 0;
  // exakt-exp: the sum over a1 in Z_{p^n} reduces to a1 mod p by z -> z + c
  // translations, which shift a1 by 2 a2 c + O(p) while keeping a2 a unit.
  for (Int a3 = 0; a3 < M; a3 += p)
    for (Int a2 = 0; a2 < M; ++a2) {
      if (a2 % p == 0) continue;
      for (Int a1 = 0; a1 < p; ++a1) {
        const auto q = CubicPoly::make(a3, a2, a1, 0, p, 4);
        const auto r = exp_sum_reduced(q);
        if (r.route != ReductionRoute::ExaktExp || !r.reduced) ++mismatches;
        if (std::abs(std::abs(r.value) - std::abs(exp_sum_direct(q))) > 1e-9) ++mismatches;
        if (std::abs(std::abs(r.value) - 25.0) > 1e-9) ++mismatches;
        ++checked;
      }
    }
  for (Int a3 = 0; a3 < M; ++a3) {
    if (a3 % p == 0) continue;
    for (Int a1 = 0; a1 < M; ++a1) {
      const auto q = CubicPoly::make(a3, 0, a1, 0, p, 4);
      const auto r = exp_sum_reduced(q);
      if (!r.reduced) ++mismatches;
      if (std::abs(std::abs(r.value) - std::abs(exp_sum_direct(q))) > 1e-9) ++mismatches;
      if (r.route == ReductionRoute::Exp && std::abs(r.value) > 2 * 25.0 + 1e-9) ++mismatches;
      ++checked;
    }
  }
  CHECK(checked == 125 * 500 * 5 + 500 * 625);
  CHECK(mismatches == 0);
}

TEST_CASE("reduced vs direct: exhaustive for p = 5, n <= 3; sampled for p = 7") {
  int mismatches = 0, in_scope = 0;
  for (int n = 1; n <= 3; ++n) {
    const Int M = ipow(5, n);
    for (Int a3 = 0; a3 < M; ++a3)
      for (Int a2 = 0; a2 < M; ++a2)
        for (Int a1 = 0; a1 < M; ++a1) {
          const auto q = CubicPoly::make(a3, a2, a1, 0, 5, n);
          const auto r = exp_sum_reduced(q);
          if (r.reduced) ++in_scope;
          if (std::abs(r.value - exp_sum_direct(q)) > 1e-9) ++mismatches;
        }
  }
  CHECK(in_scope > 0);
  auto& g = catmap::testing::rng();
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 3;
    const Int M = ipow(7, n);
    std::uniform_int_distribution<Int> u(0, M - 1), unit(1, 6);
    Int a3 = u(g), a2 = u(g), a1 = u(g);
    switch (trial % 3) {
      case 0: a3 = 7 * a3 % M; a2 = (7 * a2 + unit(g)) % M; break;  // exakt-exp
      case 1: a2 = 0; a3 = (7 * a3 + unit(g)) % M; break;            // exp / exp2
      default: a2 = 0; a3 = (7 * a3 + unit(g)) % M; a1 = 49 * a1 % M; break;
    }
    const auto q = CubicPoly::make(a3, a2, a1, u(g), 7, n);
    const auto r = exp_sum_reduced(q);
    if (classify_route(q) != ReductionRoute::Direct && !r.reduced) ++mismatches;
    if (std::abs(std::abs(r.value) - naive_modulus(q.a3, q.a2, q.a1, q.a0, 7, n)) > 1e-9) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("A constants") {
  // Every unit alpha is a cube modulo 5, so A_{alpha,1} is one number.
  std::vector<double> a5;
  for (Int alpha = 1; alpha < 5; ++alpha) a5.push_back(a_constant(alpha, 1, 5));
  CHECK(distinct_count(a5, 1e-9) == 1);
  CHECK(a5[0] == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(std::abs(exp_sum_direct(CubicPoly::make(1, 0, 4, 0, 5, 1))) / std::sqrt(5.0) ==
        doctest::Approx(a5[0]));

  for (Int p : {5, 7, 11, 13}) {
    CAPTURE(p);
    for (int n : {1, 2}) {
      std::vector<double> vals;
      const Int M = ipow(p, n);
      for (Int alpha = 1; alpha < M; ++alpha) {
        if (alpha % p == 0) continue;
        vals.push_back(a_constant(alpha, n, p));
      }
      CHECK(distinct_count(vals, 1e-9) <= 3);
      for (double a : vals) {
        if (n == 1) {
          CHECK(a >= 1.0 - 1e-12);
          CHECK(a <= 2.0 + 1e-12);
        } else {
          CHECK(a > std::sqrt(2.0));
          CHECK(a <= 2.0 + 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(a_constant(5, 1, 5), NonUnitError);
  CHECK_THROWS_AS(a_constant(1, 3, 5), std::invalid_argument);
}

TEST_CASE("A constants are constant on cube classes") {
  for (Int p : {7, 13}) {
    for (int n : {1, 2}) {
      const Int M = ipow(p, n);
      for (Int alpha : cube_class_representatives(p)) {
        const double base = a_constant(alpha, n, p);
        for (Int beta = 1; beta < M; ++beta) {
          if (beta % p == 0) continue;
          const Int ab3 = mul_mod(alpha, pow_mod(beta, 3, M), M);
          CHECK(a_constant(ab3, n, p) == doctest::Approx(base).epsilon(1e-12));
        }
      }
    }
  }
  CHECK(cube_class_representatives(5) == std::vector<Int>{1});
  const auto reps = cube_class_representatives(7);
  REQUIRE(reps.size() == 3);
  std::set<Int> cubes;
  for (Int x = 1; x < 7; ++x) cubes.insert(pow_mod(x, 3, 7));
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      CHECK_FALSE(cubes.count(mul_mod(reps[i], inverse_mod(reps[j], 7), 7)));
}

TEST_CASE("closed-form suprema: examples") {
  CHECK(expsats_sup(1, 3, 5) == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(expsats_sup(1, 1, 5) == doctest::Approx(a_constant(1, 1, 5) * std::sqrt(5.0)));
  CHECK(expsats_sup(1, 4, 5) == doctest::Approx(a_constant(1, 1, 5) * std::pow(5.0, 2.5)).epsilon(1e-12));
  CHECK(expsats_sup_brute(1, 4, 5) == doctest::Approx(a_constant(1, 1, 5) * std::pow(5.0, 2.5)).epsilon(1e-10));
}

TEST_CASE("closed-form suprema match brute force, p in {5, 7}, n <= 4") {
  for (Int p : {5, 7})
    for (int n = 1; n <= 4; ++n)
      for (Int alpha : cube_class_representatives(p)) {
        CAPTURE(p);
        CAPTURE(n);
        CAPTURE(alpha);
        CHECK(std::abs(expsats_sup(alpha, n, p) - expsats_sup_brute(alpha, n, p)) < 1e-9);
      }
}
