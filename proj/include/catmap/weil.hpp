#pragma once

// The Weil representation of SL(2, Z_{p^k}) on L^2(Z_{p^k}) for odd p, its
// tensor assembly over the CRT factors of a composite odd N, the localized
// Schwartz spaces S_k(m, n) with the intertwiners T_m, and the three 2-adic
// generator operators.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "catmap/residue.hpp"
#include "catmap/state.hpp"

namespace catmap {

/// Largest N for which an operator is materialized as a dense N x N matrix.
inline constexpr Int kDenseLimit = 700;

class UnsupportedModulusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// SL(2, Z_N)

/// Element [[a, b], [c, d]] of SL(2, Z_N), entries reduced into [0, N).
struct TorusMatrix {
  Int a = 1, b = 0, c = 0, d = 1;
  Int N = 1;

  /// Reduces the entries modulo N; throws std::invalid_argument unless ad - bc = 1 (mod N).
  static TorusMatrix make(Int a, Int b, Int c, Int d, Int N);

  static TorusMatrix identity(Int N) { return {1 % N, 0, 0, 1 % N, N}; }
  static TorusMatrix nb(Int b, Int N);
  static TorusMatrix at(Int t, Int N);
  static TorusMatrix omega(Int N);

  Int det() const;
  TorusMatrix operator*(const TorusMatrix& o) const;
  bool operator==(const TorusMatrix&) const = default;

  /// Image under Z_N -> Z_M for M | N.
  TorusMatrix reduced(Int M) const;

  /// B (x1, x2)^T in Z_N^2.
  std::pair<Int, Int> apply(Int x1, Int x2) const;
};

/// Result of the admissibility test on an integer matrix.
struct Admissibility {
  bool admissible = false;
  std::vector<std::string> failures;
};

/// Checks det = 1, |tr| > 2, odd diagonal, even off-diagonal, and A = I (mod 4) for even N.
Admissibility check_admissible(Int a, Int b, Int c, Int d, Int N);

// ---------------------------------------------------------------------------
// Generator words

struct GeneratorToken {
  enum class Kind { NB, AT, OMEGA };
  Kind kind = Kind::OMEGA;
  Int value = 0;

  bool operator==(const GeneratorToken&) const = default;
};

/// Ordered product of generators; the operator of the word applies the last token first.
struct GeneratorWord {
  std::vector<GeneratorToken> tokens;
  Int modulus = 1;

  TorusMatrix product() const;
  std::string to_string() const;
};

/// Factorization of B into n_b, a_t and omega tokens.
///
/// With c a unit this is n_{ac^{-1}} omega n_{cd} a_{-c}. Otherwise a is a
/// unit and B = omega^{-1} (omega B) = a_{-1} omega (omega B), where omega B
/// has unit lower-left entry. Trivial tokens are dropped.
GeneratorWord decompose_to_word(const TorusMatrix& B, const PrimePowerModulus& modulus);

// ---------------------------------------------------------------------------
// Prime-power representation

/// Normalizing data of the Weil representation at p^k.
struct WeilConstants {
  Int r = 0;             ///< 2^{-1} mod p^k
  int lambda_power = 0;  ///< Lambda(t) = (t/p)^lambda_power
  Complex gauss_norm;    ///< p^{-k/2} sum_x e(r x^2 / p^k)
  Int p = 0;

  double lambda(Int t) const;
};

WeilConstants weil_constants(const PrimePowerModulus& modulus);

/// Generator actions of the Weil representation at an odd prime power.
class WeilRepresentation {
 public:
  explicit WeilRepresentation(const PrimePowerModulus& modulus);

  const PrimePowerModulus& modulus() const { return modulus_; }
  const WeilConstants& constants() const { return constants_; }
  Int dimension() const { return modulus_.M; }

  /// psi(x) -> e(r b x^2 / p^k) psi(x)
  StateVector apply_nb(Int b, const StateVector& psi) const;
  /// psi(x) -> Lambda(t) psi(t x); t must be a unit.
  StateVector apply_at(Int t, const StateVector& psi) const;
  /// psi(x) -> gauss_norm p^{-k/2} sum_y psi(y) e(2 r x y / p^k)
  StateVector apply_omega(const StateVector& psi) const;

  StateVector apply(const GeneratorToken& token, const StateVector& psi) const;
  StateVector apply(const GeneratorWord& word, const StateVector& psi) const;

  /// Dense matrix of U(B) from the closed-form kernel, O(N^2) entries.
  OperatorMatrix dense(const TorusMatrix& B, Int limit = kDenseLimit) const;

  const RootTable& roots() const { return roots_; }

 private:
  void check_size(const StateVector& psi) const;

  PrimePowerModulus modulus_;
  WeilConstants constants_;
  RootTable roots_;
};

/// U_{p^k}(B) in action form. Cheap to copy; shares the generator tables.
class QuantizedOperator {
 public:
  QuantizedOperator(std::shared_ptr<const WeilRepresentation> rep, const TorusMatrix& B);

  StateVector apply(const StateVector& psi) const { return rep_->apply(word_, psi); }
  StateVector operator()(const StateVector& psi) const { return apply(psi); }
  OperatorMatrix dense(Int limit = kDenseLimit) const { return rep_->dense(matrix_, limit); }

  const GeneratorWord& word() const { return word_; }
  const TorusMatrix& matrix() const { return matrix_; }
  Int dimension() const { return rep_->dimension(); }
  const WeilRepresentation& representation() const { return *rep_; }

 private:
  std::shared_ptr<const WeilRepresentation> rep_;
  TorusMatrix matrix_;
  GeneratorWord word_;
};

/// U_{p^k}(B) for B given modulo p^k (or any multiple of it).
QuantizedOperator quantize(const TorusMatrix& B, const PrimePowerModulus& modulus);
QuantizedOperator quantize(const TorusMatrix& B, std::shared_ptr<const WeilRepresentation> rep);

// ---------------------------------------------------------------------------
// Composite N

/// U_N(A) = tensor product of U_{p_j^{a_j}}(A) under Z_N = prod Z_{p_j^{a_j}}.
class TensorOperator {
 public:
  explicit TensorOperator(const TorusMatrix& A);

  StateVector apply(const StateVector& psi) const;
  StateVector operator()(const StateVector& psi) const { return apply(psi); }
  OperatorMatrix dense(Int limit = kDenseLimit) const;

  Int dimension() const { return N_; }
  const std::vector<QuantizedOperator>& factors() const { return factors_; }

 private:
  Int N_;
  std::vector<QuantizedOperator> factors_;
  std::vector<Int> strides_;
};

/// Throws UnsupportedModulusError for even N.
TensorOperator tensor_quantize(const TorusMatrix& A);

// ---------------------------------------------------------------------------
// Schwartz spaces and intertwiners

/// psi in S_k(m, n): p^m | x - y => psi(x) = psi(y), and p^n does not divide x => psi(x) = 0.
bool schwartz_membership(const StateVector& psi, const PrimePowerModulus& modulus, int m, int n,
                         double tol = 1e-12);

/// Indicator of the ideal p^{k/2} Z_{p^k} (k even), unnormalized.
StateVector storfunktion(const PrimePowerModulus& modulus);

/// (T_m psi)(x) = p^{-m/2} psi(p^m x) on Z_{p^{k-2m}}; requires psi in S_k(k-m, m).
StateVector t_m_forward(const StateVector& psi, const PrimePowerModulus& modulus, int m);
/// Inverse of t_m_forward, from L^2(Z_{p^{k-2m}}) into S_k(k-m, m).
StateVector t_m_inverse(const StateVector& phi, const PrimePowerModulus& modulus, int m);

// ---------------------------------------------------------------------------
// p = 2

/// The operators available at N = 2^k: n_b for even b, a_t for odd t, the
/// normalized Fourier operator H, and n_c^T = H^{-1} U(n_{-c}) H. These
/// generate the action of the level-4 congruence subgroup; no composed
/// U_{2^k}(B) is offered.
class TwoAdicGenerators {
 public:
  explicit TwoAdicGenerators(int k);

  Int dimension() const { return M_; }

  /// psi(x) -> e((b/2) x^2 / 2^k) psi(x); b must be even.
  StateVector apply_nb(Int b, const StateVector& psi) const;
  /// psi(x) -> psi(t x); t must be odd.
  StateVector apply_at(Int t, const StateVector& psi) const;
  /// psi(x) -> 2^{-k/2} sum_y psi(y) e(x y / 2^k)
  StateVector apply_h(const StateVector& psi) const;
  StateVector apply_h_inverse(const StateVector& psi) const;
  StateVector apply_nc_transpose(Int c, const StateVector& psi) const;

  /// Always throws UnsupportedModulusError.
  [[noreturn]] QuantizedOperator quantize(const TorusMatrix& B) const;

 private:
  int k_;
  Int M_;
  RootTable roots_;
};

}  // namespace catmap
