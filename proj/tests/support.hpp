#pragma once

// Shared helpers for the test binaries: seeded random states and matrices.

#include <random>

#include "catmap/state.hpp"
#include "catmap/weil.hpp"

namespace catmap::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline Int uniform(Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng()); }

inline StateVector random_state(Int N) {
  std::normal_distribution<double> g;
  StateVector psi(N);
  for (Int i = 0; i < N; ++i) psi(i) = Complex(g(rng()), g(rng()));
  return normalized(psi);
}

/// Uniform-ish element of SL(2, Z_N): random first column with unit content, then a completion.
inline TorusMatrix random_sl2(Int N) {
  for (;;) {
    const Int a = uniform(0, N - 1), c = uniform(0, N - 1);
    if (gcd(gcd(a, c), N) != 1) continue;
    Int b, d;
    if (gcd(a, N) == 1) {
      // a d - b c = 1  =>  d = a^{-1}(1 + b c) for free b
      b = uniform(0, N - 1);
      d = mul_mod(inverse_mod(a, N), add_mod(1, mul_mod(b, c, N), N), N);
    } else if (gcd(c, N) == 1) {
      d = uniform(0, N - 1);
      b = mul_mod(inverse_mod(c, N), sub_mod(mul_mod(a, d, N), 1, N), N);
    } else {
      continue;
    }
    return TorusMatrix::make(a, b, c, d, N);
  }
}

/// Integer matrix in the level-2 congruence group with |tr| > 2, built as a
/// short product of [[1,2],[0,1]]^i and [[1,0],[2,1]]^j.
struct IntMatrix {
  Int a, b, c, d;
};

inline IntMatrix random_admissible() {
  for (;;) {
    IntMatrix m{1, 0, 0, 1};
    const int len = static_cast<int>(uniform(2, 4));
    for (int s = 0; s < len; ++s) {
      const Int e = 2 * uniform(-3, 3);
      if (s % 2 == 0) m = {m.a, m.a * e + m.b, m.c, m.c * e + m.d};
      else m = {m.a + m.b * e, m.b, m.c + m.d * e, m.d};
    }
    if (check_admissible(m.a, m.b, m.c, m.d, 625).admissible) return m;
  }
}

inline TorusMatrix to_torus(const IntMatrix& m, Int N) { return TorusMatrix::make(m.a, m.b, m.c, m.d, N); }

}  // namespace catmap::testing
