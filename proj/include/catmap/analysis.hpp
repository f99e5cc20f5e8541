#pragma once

// Sup norms, entropies and the checks that compare measured eigenfunction
// statistics with their closed forms. Every check returns VerificationReports;
// nothing here throws on a failed comparison, only on a mis-routed input.

#include <optional>
#include <string>
#include <vector>

#include "catmap/hecke.hpp"
#include "catmap/measures.hpp"
#include "catmap/weil.hpp"

namespace catmap {

class RoutingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One comparison. An interval prediction passes when lo - tol <= measured <= hi + tol;
/// a missing end is unbounded.
struct VerificationReport {
  std::string theorem;
  Int N = 0, p = 0;
  int k = 0;
  std::string d_class;  ///< split / inert / ramified, or empty
  std::string c_class;  ///< residue / nonresidue / zero / none
  std::string subject;  ///< which vector or object was measured
  std::optional<double> lo, hi;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_s = 0.0;
  std::string note;

  /// Recomputes pass from the interval, measured value and tolerance.
  void settle();
  /// Distance of measured outside the tolerated interval, 0 when inside.
  double violation() const;
};

/// Deterministic order: theorem, N, subject.
void sort_reports(std::vector<VerificationReport>& reports);
bool all_pass(const std::vector<VerificationReport>& reports);

// ---------------------------------------------------------------------------
// Entropy

/// max |U_ij|.
double c_max(const OperatorMatrix& U);
/// Materializes U through its closed-form kernel (any N whose N^2 entries fit in memory).
double c_max(const QuantizedOperator& U);

/// h(psi) + h(U psi) >= -2 log c(U).
VerificationReport eup_check(const StateVector& psi, const OperatorMatrix& U);

/// Every record satisfies h >= (1/2) log N; equality cases are named in the note.
std::vector<VerificationReport> verify_entropy_bound(const Eigenbasis& basis, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Sup-norm theorems

enum class Route { Sup1, Supformel, Ramified, Last, Unrouted };
const char* to_string(Route r);

/// Which closed form governs the sup norm (or pointwise values) of a record.
Route route(const Eigenbasis& basis, const EigenRecord& rec);

/// (1 - (D/p)/p)^{-1/2}
double norm_factor(Int D, Int p);

/// [2 (1 - pi^2/(8N)), 2] * norm
std::pair<double, double> sup1_interval(const Eigenbasis& basis);
/// The three-case closed form for (C/p) = (D/p), k > 1.
double supformel_value(const Eigenbasis& basis, const EigenRecord& rec);

std::vector<VerificationReport> verify_sup1(const Eigenbasis& basis, double tol = 1e-9);
std::vector<VerificationReport> verify_supformel(const Eigenbasis& basis, double tol = 1e-6);
std::vector<VerificationReport> verify_ramified(const Eigenbasis& basis, double tol = 1e-9);
std::vector<VerificationReport> verify_last(const Eigenbasis& basis, double tol = 1e-9);
std::vector<VerificationReport> verify_supupp(const Eigenbasis& basis, double tol = 1e-9);
std::vector<VerificationReport> verify_supupp(const std::vector<TensorEigenvector>& vectors, Int N,
                                              double tol = 1e-9);

/// Existence of an eigenfunction of U_N(A) in S_k(k - [k/2], [k/2]) with sup >= p^{[k/2]/2}:
/// the storfunktion for even k, a lifted eigenvector from p^{k - 2[k/2]} for odd k.
VerificationReport verify_satsen(const TorusMatrix& A, const PrimePowerModulus& N, double tol = 1e-9);

/// Measured |psi(b)| inside the closed-form prediction for every unit-C record and every b.
std::vector<VerificationReport> verify_sats_containment(const Eigenbasis& basis, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Band structure of the new-form sup norms

struct BandPoint {
  std::size_t record = 0;  ///< index into basis.records
  double eigenphase = 0.0;
  double sup_norm = 0.0;
  std::string label;  ///< sup1 / supformel / ramified / last / other
};

struct BandSummary {
  std::vector<BandPoint> points;    ///< every new form, in record order
  std::vector<double> levels;       ///< distinct counted values (sup1 band first, at its top edge)
  int distinct = 0;                 ///< number of counted levels
  std::vector<std::pair<std::string, double>> predicted;  ///< annotated predicted levels
};

/// Counts distinct sup values of the unit-C new forms: values within 10/N of
/// the sup1 interval form one band, the rest are merged at relative tolerance 1e-6.
/// p | C new forms are labelled and plotted but not counted.
BandSummary band_summary(const Eigenbasis& basis);

}  // namespace catmap
