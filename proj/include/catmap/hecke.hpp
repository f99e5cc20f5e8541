#pragma once

// Hecke operators of a cat map: conjugation to the norm-one torus H_D, the
// zeta_x basis on which the torus acts monomially, the V_C decomposition, the
// joint eigenbasis, and the closed-form values of eigenfunctions.

#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "catmap/residue.hpp"
#include "catmap/state.hpp"
#include "catmap/weil.hpp"

namespace catmap {

class UpperTriangularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class PrimeClass { Split, Inert, Ramified };
const char* to_string(PrimeClass c);
PrimeClass classify(Int D, Int p);

/// A = n_beta h n_{-beta} with h = [[a, D b], [b, a]] in H_D.
struct HeckeFrame {
  TorusMatrix A;
  TorusMatrix h;
  Int beta = 0;
  Int D = 0;
  Int N = 1;
  std::vector<std::pair<Int, PrimeClass>> classes;  ///< one entry per prime dividing N

  PrimeClass classification(Int p) const;
  /// n_beta g n_{-beta}: carries a torus element to the Hecke operator of A.
  TorusMatrix conjugate(const TorusMatrix& g) const;
};

/// Requires the lower-left entry of A to be a unit modulo every prime of N.
HeckeFrame normalize_to_torus(const TorusMatrix& A);

struct TorusPoint {
  Int a = 1, b = 0;
  auto operator<=>(const TorusPoint&) const = default;
};

/// H_D(Z_M) = {(a, b) : a^2 - D b^2 = 1}, with a generator and discrete logs.
class HeckeTorus {
 public:
  HeckeTorus(Int D, Int M);

  Int D() const { return D_; }
  Int modulus() const { return M_; }
  Int size() const { return static_cast<Int>(points_.size()); }
  const std::vector<TorusPoint>& points() const { return points_; }
  const TorusPoint& generator() const { return generator_; }

  TorusPoint multiply(const TorusPoint& x, const TorusPoint& y) const;
  TorusPoint power(const TorusPoint& x, Int e) const;
  TorusMatrix matrix(const TorusPoint& x) const;
  bool contains(const TorusPoint& x) const;
  /// e in [0, size) with generator^e = x.
  Int log(const TorusPoint& x) const;

 private:
  Int D_, M_;
  std::vector<TorusPoint> points_;
  TorusPoint generator_;
  std::unordered_map<Int, Int> log_;
};

/// Complete enumeration of H_D(Z_{p^k}) together with a maximal-order element.
HeckeTorus enumerate_torus(Int D, const PrimePowerModulus& modulus);

// ---------------------------------------------------------------------------
// zeta_x basis (N = p^{2k}, indices modulo p^k)

struct ZetaIndex {
  Int x1 = 0, x2 = 0;
  auto operator<=>(const ZetaIndex&) const = default;
};

/// zeta_x expressed as e(phase / N) zeta_{x'}.
struct ZetaImage {
  ZetaIndex x;
  Int phase = 0;
};

/// sum_{t mod p^k} e(x1 t / p^k) delta_{x2 + p^k t}; the modulus must have even exponent.
StateVector zeta_state(const ZetaIndex& x, const PrimePowerModulus& N);

/// Rewrites zeta_x (x in Z_N^2) as a root of unity times zeta of an index in [0, p^k)^2.
ZetaImage zeta_canonical(const ZetaIndex& x, const PrimePowerModulus& N);

/// U(B) zeta_x = e(r (x1' x2' - x1 x2) / N) zeta_{x'}, x' = B x in Z_N^2 (not canonicalized).
ZetaImage zeta_action(const TorusMatrix& B, const ZetaIndex& x);

/// x1^2 - D x2^2 modulo m.
Int norm_form(const ZetaIndex& x, Int D, Int m);

/// Number of x in Z_{p^k}^2 with x1^2 - D x2^2 = -C, by enumeration.
Int vc_dimension(Int C, Int D, const PrimePowerModulus& modulus);
/// p^k - (D/p) p^{k-1}; needs p not dividing C D.
Int vc_dimension_closed_form(Int C, Int D, const PrimePowerModulus& modulus);
std::vector<ZetaIndex> vc_members(Int C, Int D, const PrimePowerModulus& modulus);

// ---------------------------------------------------------------------------
// Eigenbasis

enum class VpmTag { None, Plus, Minus };
const char* to_string(VpmTag t);

struct EigenRecord {
  Int N = 0;
  Int p = 0;
  int k = 0;          ///< exponent of N
  Int C = -1;         ///< V_C label modulo p^{k/2}; -1 when the exponent is odd
  Int C_tilde = -1;   ///< eigenvalue lift modulo p^{k/2 + [k/4]}; -1 when undefined
  Int phase_num = 0;  ///< eigenvalue at the generator is e(phase_num / phase_den),
  Int phase_den = 1;  ///< with phase_num / phase_den in [-1/2, 1/2)
  double eigenphase = 0.0;
  int oldform_level = 0;
  VpmTag vpm_tag = VpmTag::None;
  double sup_norm = 0.0;
  double entropy = 0.0;
  ZetaIndex orbit_rep;
  Int orbit_length = 0;
  StateVector vector;

  bool is_new_form() const { return oldform_level == 0; }
};

/// Joint eigenbasis of the Hecke operators of A at a single prime power.
struct Eigenbasis {
  HeckeFrame frame;
  PrimePowerModulus modulus;
  HeckeTorus torus;
  std::vector<EigenRecord> records;  ///< sorted by eigenphase, then C, C_tilde, orbit
  std::string path;                  ///< "square" or "general"
  double scalar_defect = 0.0;        ///< max |M^ord - mu I| on the general path

  /// Hecke operator of A attached to the torus point x.
  TorusMatrix hecke_matrix(const TorusPoint& x) const { return frame.conjugate(torus.matrix(x)); }
};

/// N = p^{2k}: orbit construction in the zeta_x basis. Exact phases throughout.
Eigenbasis eigenbasis_square(const HeckeFrame& frame, const PrimePowerModulus& N, int jobs = 1);

/// Odd exponent: spectral decomposition of the quantized generator.
Eigenbasis eigenbasis_general(const HeckeFrame& frame, const PrimePowerModulus& N, int jobs = 1);

/// Dispatches on the parity of the exponent.
Eigenbasis compute_eigenbasis(const HeckeFrame& frame, const PrimePowerModulus& N, int jobs = 1);

/// Re-tags the p | C new forms of a split frame by the support of their orbit.
void vpm_split(Eigenbasis& basis);

/// Largest m with psi in S_k(k - m, m), capped at k/2.
int oldform_level(const StateVector& psi, const PrimePowerModulus& N, double tol = 1e-9);

/// Eigenvalue of a record at the torus point x, as the exact fraction num/den (den > 0).
std::pair<Int, Int> record_eigenvalue(const Eigenbasis& basis, const EigenRecord& rec,
                                      const TorusPoint& x);

/// The lift C~ modulo p^{k+s} read off the eigenvalue e(r C~ / p^{k+s}) at
/// (1 + r D q^2, q D; q, 1 + r D q^2), q = p^{k-s}, for 2s <= k (N = p^{2k}).
Int c_tilde_lift(const Eigenbasis& basis, const EigenRecord& rec, int s);

// ---------------------------------------------------------------------------
// Closed-form point values

class SatsCaseError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SatsPrediction {
  enum class Kind { Vanishing, Sats1, Sats2 };
  Kind kind = Kind::Vanishing;
  double lo = 0.0;  ///< predicted |psi(b)| lies in [lo, hi]
  double hi = 0.0;
  int s = 0;
  Int x0 = 0;
  Int theta = 0;
};

const char* to_string(SatsPrediction::Kind k);

/// |psi(b)| for a unit-C new form when -C + D b^2 has a root set of unit-pair
/// or coset type; throws SatsCaseError otherwise.
SatsPrediction sats1_predict(const Eigenbasis& basis, const EigenRecord& rec, Int b);
/// |psi(b)| when -C + D b^2 = 0 mod p^k; throws SatsCaseError otherwise.
SatsPrediction sats2_predict(const Eigenbasis& basis, const EigenRecord& rec, Int b);
/// Routes to the vanishing case, sats1_predict or sats2_predict.
SatsPrediction predict_value(const Eigenbasis& basis, const EigenRecord& rec, Int b);

// ---------------------------------------------------------------------------
// Lifting and composite moduli

/// T_m^{-1} applied to each record of a basis at p^{k-2m}; returns eigenvectors at p^k.
std::vector<StateVector> lift_eigenvectors(const Eigenbasis& lower, const PrimePowerModulus& N,
                                           int m);

/// Product eigenvectors psi(x) = prod_j psi_j(x mod p_j^{a_j}) over CRT factors.
struct TensorEigenvector {
  std::vector<std::size_t> factor_index;
  StateVector vector;
  double sup_norm = 0.0;
};

std::vector<TensorEigenvector> tensor_eigenbasis(const std::vector<Eigenbasis>& factors, Int N);

}  // namespace catmap
