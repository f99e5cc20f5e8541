#include <doctest.h>

#include <cmath>

#include "catmap/weil.hpp"
#include "support.hpp"

using namespace catmap;
using catmap::testing::random_sl2;
using catmap::testing::random_state;
using catmap::testing::uniform;

namespace {

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

// Reference generator matrices written straight from the defining formulas,
// with the Gauss normalization obtained by direct summation.
struct ReferenceGenerators {
  PrimePowerModulus mod;
  Int r;
  Complex gauss;

  explicit ReferenceGenerators(PrimePowerModulus m) : mod(m), r((m.M + 1) / 2) {
    Complex s = 0.0;
    for (Int x = 0; x < m.M; ++x) s += std::polar(1.0, 2 * std::numbers::pi * double((r * x % m.M) * x % m.M) / m.M);
    gauss = s / std::sqrt(double(m.M));
  }
  double lambda(Int t) const {
    Int leg = 1;  // Euler's criterion
    for (Int e = 0; e < (mod.p - 1) / 2; ++e) leg = leg * (reduce(t, mod.p)) % mod.p;
    return (leg == 1 || mod.k % 2 == 0) ? 1.0 : -1.0;
  }
  OperatorMatrix nb(Int b) const {
    OperatorMatrix U = OperatorMatrix::Zero(mod.M, mod.M);
    for (Int x = 0; x < mod.M; ++x) U(x, x) = unit_root(mul_mod(r * b % mod.M, x * x, mod.M), mod.M);
    return U;
  }
  OperatorMatrix at(Int t) const {
    OperatorMatrix U = OperatorMatrix::Zero(mod.M, mod.M);
    for (Int x = 0; x < mod.M; ++x) U(x, reduce(t * x, mod.M)) = lambda(t);
    return U;
  }
  OperatorMatrix omega() const {
    OperatorMatrix U(mod.M, mod.M);
    for (Int x = 0; x < mod.M; ++x)
      for (Int y = 0; y < mod.M; ++y)
        U(x, y) = gauss / std::sqrt(double(mod.M)) * unit_root(mul_mod(2 * r, x * y, mod.M), mod.M);
    return U;
  }
};

OperatorMatrix word_matrix(const ReferenceGenerators& g, const GeneratorWord& w) {
  OperatorMatrix U = OperatorMatrix::Identity(g.mod.M, g.mod.M);
  for (const auto& t : w.tokens) {
    switch (t.kind) {
      case GeneratorToken::Kind::NB: U = U * g.nb(t.value); break;
      case GeneratorToken::Kind::AT: U = U * g.at(t.value); break;
      case GeneratorToken::Kind::OMEGA: U = U * g.omega(); break;
    }
  }
  return U;
}

}  // namespace

TEST_CASE("admissibility diagnostics") {
  CHECK(check_admissible(3, 2, 4, 3, 25).admissible);
  const auto bad = check_admissible(1, 1, 1, 2, 25);
  CHECK_FALSE(bad.admissible);
  bool off_diagonal = false;
  for (const auto& f : bad.failures) off_diagonal |= f.find("off-diagonal") != std::string::npos;
  CHECK(off_diagonal);
  CHECK(check_admissible(1, 2, 2, 5, 625).admissible);
  CHECK_FALSE(check_admissible(1, 2, 0, 1, 25).admissible);  // parabolic
  CHECK_FALSE(check_admissible(3, 2, 4, 3, 8).admissible);   // not I mod 4
}

TEST_CASE("torus matrix construction rejects det != 1") {
  CHECK_THROWS_AS(TorusMatrix::make(1, 1, 1, 1, 25), std::invalid_argument);
  CHECK(TorusMatrix::make(-1, 0, 0, -1, 25).a == 24);
}

TEST_CASE("decompose_to_word examples") {
  const auto m25 = PrimePowerModulus::make(5, 2);
  auto w = decompose_to_word(TorusMatrix::nb(5, 25), m25);
  REQUIRE(w.tokens.size() == 1);
  CHECK(w.tokens[0] == GeneratorToken{GeneratorToken::Kind::NB, 5});

  const auto B = TorusMatrix::make(3, 4, 2, 3, 25);
  w = decompose_to_word(B, m25);
  REQUIRE(w.tokens.size() == 4);
  CHECK(w.tokens[0] == GeneratorToken{GeneratorToken::Kind::NB, 14});
  CHECK(w.tokens[1].kind == GeneratorToken::Kind::OMEGA);
  CHECK(w.tokens[2] == GeneratorToken{GeneratorToken::Kind::NB, 6});
  CHECK(w.tokens[3] == GeneratorToken{GeneratorToken::Kind::AT, 23});
  CHECK(w.product() == B);

  w = decompose_to_word(TorusMatrix::omega(25), m25);
  REQUIRE(w.tokens.size() == 1);
  CHECK(w.tokens[0].kind == GeneratorToken::Kind::OMEGA);
  CHECK(decompose_to_word(TorusMatrix::identity(25), m25).tokens.empty());
}

TEST_CASE("decompose_to_word reproduces random matrices, including non-unit c") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 4}, {7, 3}, {3, 3}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    for (int i = 0; i < 300; ++i) {
      TorusMatrix B = random_sl2(mod.M);
      if (i % 3 == 0) B = B * TorusMatrix::make(1, 0, p * uniform(0, mod.M), 1, mod.M) * TorusMatrix::omega(mod.M);
      const auto w = decompose_to_word(B, mod);
      REQUIRE(w.product() == B);
      REQUIRE(w.tokens.size() <= 8);
    }
  }
}

TEST_CASE("generator actions agree with the reference formulas") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 3}, {7, 2}, {3, 3}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    const WeilRepresentation rep(mod);
    const ReferenceGenerators ref(mod);
    CHECK(std::abs(rep.constants().gauss_norm - ref.gauss) < 1e-12);
    CHECK(mul_mod(2, rep.constants().r, mod.M) == 1);
    const StateVector psi = random_state(mod.M);
    CHECK(max_abs(rep.apply_nb(7, psi) - ref.nb(7) * psi) < 1e-12);
    CHECK(max_abs(rep.apply_at(2, psi) - ref.at(2) * psi) < 1e-12);
    CHECK(max_abs(rep.apply_at(-2 + mod.M, psi) - ref.at(mod.M - 2) * psi) < 1e-12);
    CHECK(max_abs(rep.apply_omega(psi) - ref.omega() * psi) < 1e-10);
    CHECK_THROWS_AS(rep.apply_at(p, psi), NonUnitError);
  }
}

TEST_CASE("dense closed form agrees with the generator word") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 3}, {7, 2}, {7, 3}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    auto rep = std::make_shared<const WeilRepresentation>(mod);
    const ReferenceGenerators ref(mod);
    for (int i = 0; i < 6; ++i) {
      TorusMatrix B = random_sl2(mod.M);
      if (i % 2) B = TorusMatrix::make(1, 0, p * uniform(0, mod.M), 1, mod.M) * TorusMatrix::at(uniform(1, p - 1), mod.M) * TorusMatrix::nb(uniform(0, mod.M), mod.M);
      const auto U = quantize(B, rep);
      REQUIRE(max_abs(U.dense() - word_matrix(ref, U.word())) < 1e-10);
    }
  }
}

TEST_CASE("small examples of the generator actions") {
  const auto m25 = PrimePowerModulus::make(5, 2);
  const WeilRepresentation rep(m25);
  const StateVector psi = random_state(25);
  CHECK(max_abs(rep.apply_nb(0, psi) - psi) < 1e-15);

  const StateVector f = rep.apply_omega(delta_state(25, 0));
  for (Int x = 0; x < 25; ++x) CHECK(std::abs(f(x) - rep.constants().gauss_norm / 5.0) < 1e-14);

  const StateVector g = rep.apply_omega(rep.apply_omega(delta_state(25, 1)));
  CHECK(std::abs(std::abs(g(24)) - 1.0) < 1e-12);
  CHECK((g - g(24) * delta_state(25, 24)).norm() < 1e-12);

  const auto U1 = quantize(TorusMatrix::nb(1, 25), m25).dense();
  const auto U2 = quantize(TorusMatrix::nb(2, 25), m25).dense();
  CHECK(max_abs(U1 * U1 - U2) < 1e-12);
  CHECK(max_abs(quantize(TorusMatrix::identity(25), m25).dense() - OperatorMatrix::Identity(25, 25)) < 1e-15);
}

TEST_CASE("fourier involution on every point mass") {
  for (Int M : {25, 125, 49}) {
    const auto f = crt_split(M)[0];
    const WeilRepresentation rep(f);
    for (Int x = 0; x < M; ++x) {
      const StateVector g = rep.apply_omega(rep.apply_omega(delta_state(M, x)));
      const Int y = reduce(-x, M);
      REQUIRE(std::abs(std::abs(g(y)) - 1.0) < 1e-10);
      REQUIRE((g - g(y) * delta_state(M, y)).norm() < 1e-10);
    }
  }
}

TEST_CASE("unitarity of quantized operators") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 4}, {7, 3}, {7, 4}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    auto rep = std::make_shared<const WeilRepresentation>(mod);
    for (int i = 0; i < (mod.M > 700 ? 2 : 10); ++i) {
      const auto U = quantize(random_sl2(mod.M), rep);
      const StateVector psi = random_state(mod.M);
      REQUIRE(std::abs(l2_norm(U(psi)) - l2_norm(psi)) < 1e-10);
    }
  }
}

TEST_CASE("representation property on random pairs") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 3}, {7, 3}, {3, 3}, {11, 2}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    auto rep = std::make_shared<const WeilRepresentation>(mod);
    for (int i = 0; i < 12; ++i) {
      const TorusMatrix B1 = random_sl2(mod.M), B2 = random_sl2(mod.M);
      const auto lhs = quantize(B1 * B2, rep).dense();
      const OperatorMatrix rhs = quantize(B1, rep).dense() * quantize(B2, rep).dense();
      REQUIRE(max_abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("tensor quantization over CRT factors") {
  const auto A = TorusMatrix::make(1, 2, 2, 5, 45);
  const auto T = tensor_quantize(A);
  const StateVector psi = random_state(45);
  CHECK(std::abs(l2_norm(T(psi)) - l2_norm(psi)) < 1e-12);

  const auto U9 = quantize(A.reduced(9), PrimePowerModulus::make(3, 2)).dense();
  const auto U5 = quantize(A.reduced(5), PrimePowerModulus::make(5, 1)).dense();
  OperatorMatrix expected(45, 45);
  for (Int x = 0; x < 45; ++x)
    for (Int y = 0; y < 45; ++y) expected(x, y) = U9(x % 9, y % 9) * U5(x % 5, y % 5);
  CHECK(max_abs(T.dense() - expected) < 1e-12);

  const auto single = tensor_quantize(TorusMatrix::make(1, 2, 2, 5, 25));
  const auto direct = quantize(TorusMatrix::make(1, 2, 2, 5, 25), PrimePowerModulus::make(5, 2));
  CHECK(max_abs(single.dense() - direct.dense()) < 1e-15);

  CHECK_THROWS_AS(tensor_quantize(TorusMatrix::make(1, 2, 2, 5, 90)), UnsupportedModulusError);
}

TEST_CASE("schwartz membership examples") {
  const auto m25 = PrimePowerModulus::make(5, 2);
  CHECK(schwartz_membership(storfunktion(m25), m25, 1, 1));
  CHECK(schwartz_membership(delta_state(25, 0), m25, 2, 2));
  StateVector zeta = StateVector::Zero(25);  // zeta_(1,1)
  for (Int t = 0; t < 5; ++t) zeta(1 + 5 * t) = unit_root(t, 5);
  CHECK_FALSE(schwartz_membership(zeta, m25, 1, 1));
}

namespace {

// Random element of S_k(m, n) for n <= m: supported on p^n Z, constant modulo p^m.
StateVector random_schwartz(const PrimePowerModulus& mod, int m, int n) {
  const Int pm = ipow(mod.p, m), pn = ipow(mod.p, n);
  const StateVector f = random_state(pm);
  StateVector psi = StateVector::Zero(mod.M);
  for (Int y = 0; y < mod.M; y += pn) psi(y) = f(y % pm);
  return psi;
}

}  // namespace

TEST_CASE("intertwiners T_m") {
  const auto m625 = PrimePowerModulus::make(5, 4);
  const auto m25 = PrimePowerModulus::make(5, 2);
  const StateVector psi = random_state(625);
  CHECK(max_abs(t_m_forward(psi, m625, 0) - psi) < 1e-15);

  const StateVector f = storfunktion(m625);
  const StateVector tf = t_m_forward(f, m625, 2);
  REQUIRE(tf.size() == 1);
  CHECK(std::abs(tf(0) - 0.2) < 1e-15);
  CHECK(std::abs(l2_norm(tf) - l2_norm(f)) < 1e-12);

  const auto A = TorusMatrix::make(1, 2, 2, 5, 625);
  const auto U4 = quantize(A, m625);
  const auto U2 = quantize(A.reduced(25), m25);
  for (int i = 0; i < 10; ++i) {
    const StateVector s = random_schwartz(m625, 3, 1);
    REQUIRE(schwartz_membership(s, m625, 3, 1));
    const StateVector fwd = t_m_forward(s, m625, 1);
    REQUIRE(std::abs(l2_norm(fwd) - l2_norm(s)) < 1e-12);
    REQUIRE(max_abs(t_m_inverse(fwd, m625, 1) - s) < 1e-12);
    REQUIRE(max_abs(U4(s) - t_m_inverse(U2(fwd), m625, 1)) < 1e-10);
  }
  CHECK_THROWS_AS(t_m_forward(psi, m625, 1), std::invalid_argument);
}

TEST_CASE("S_k(m, k-m) is invariant under quantized matrices") {
  for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 3}, {5, 4}, {7, 3}}) {
    const auto mod = PrimePowerModulus::make(p, k);
    auto rep = std::make_shared<const WeilRepresentation>(mod);
    for (int m = (k + 1) / 2; m <= k; ++m) {
      for (int i = 0; i < 8; ++i) {
        const auto U = quantize(random_sl2(mod.M), rep);
        const StateVector psi = random_schwartz(mod, m, k - m);
        REQUIRE(schwartz_membership(U(psi), mod, m, k - m, 1e-10));
      }
    }
  }
}

TEST_CASE("p = 2 generator operators") {
  const TwoAdicGenerators g3(3);
  const StateVector psi = random_state(8);
  CHECK(max_abs(g3.apply_nb(0, psi) - psi) < 1e-15);
  CHECK(std::abs(l2_norm(g3.apply_h(psi)) - l2_norm(psi)) < 1e-12);
  CHECK(max_abs(g3.apply_h_inverse(g3.apply_h(psi)) - psi) < 1e-12);
  CHECK_THROWS_AS(g3.quantize(TorusMatrix::identity(8)), UnsupportedModulusError);
  CHECK_THROWS_AS(quantize(TorusMatrix::identity(8), PrimePowerModulus::make(2, 3)), UnsupportedModulusError);

  // S_k(m, k-1-m) is preserved for m <= k <= 2m+1.
  for (int k = 1; k <= 6; ++k) {
    const TwoAdicGenerators g(k);
    const auto mod = PrimePowerModulus::make(2, k);
    for (int m = 0; m <= k; ++m) {
      if (!(m <= k && k <= 2 * m + 1) || k - 1 - m < 0) continue;
      for (int i = 0; i < 5; ++i) {
        const StateVector s = random_schwartz(mod, m, k - 1 - m);
        for (Int b : {4, 8, 12})
          REQUIRE(schwartz_membership(g.apply_nb(b, s), mod, m, k - 1 - m, 1e-10));
        for (Int t : {5, 9, 13})
          REQUIRE(schwartz_membership(g.apply_at(t, s), mod, m, k - 1 - m, 1e-10));
        for (Int c : {4, 8})
          REQUIRE(schwartz_membership(g.apply_nc_transpose(c, s), mod, m, k - 1 - m, 1e-10));
      }
    }
  }
}
