#include "catmap/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "catmap/expsum.hpp"

namespace catmap {

void VerificationReport::settle() { pass = violation() == 0.0 && std::isfinite(measured); }

double VerificationReport::violation() const {
  if (!std::isfinite(measured)) return std::numeric_limits<double>::infinity();
  if (lo && measured < *lo - tolerance) return *lo - tolerance - measured;
  if (hi && measured > *hi + tolerance) return measured - *hi - tolerance;
  return 0.0;
}

void sort_reports(std::vector<VerificationReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const auto& x, const auto& y) {
    return std::tie(x.theorem, x.N, x.subject) < std::tie(y.theorem, y.N, y.subject);
  });
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string c_class(const EigenRecord& rec) {
  if (rec.C < 0) return "none";
  if (rec.C % rec.p == 0) return "zero";
  return jacobi_symbol(rec.C, rec.p) == 1 ? "residue" : "nonresidue";
}

std::string record_subject(std::size_t i, const EigenRecord& rec) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "record %05zu (C=%lld, C~=%lld)", i, static_cast<long long>(rec.C),
                static_cast<long long>(rec.C_tilde));
  return buf;
}

VerificationReport base_report(const std::string& theorem, const Eigenbasis& basis) {
  VerificationReport r;
  r.theorem = theorem;
  r.N = basis.modulus.M;
  r.p = basis.modulus.p;
  r.k = basis.modulus.k;
  r.d_class = to_string(basis.frame.classification(basis.modulus.p));
  return r;
}

VerificationReport record_report(const std::string& theorem, const Eigenbasis& basis, std::size_t i) {
  auto r = base_report(theorem, basis);
  r.c_class = c_class(basis.records[i]);
  r.subject = record_subject(i, basis.records[i]);
  return r;
}

void require_square(const Eigenbasis& basis, const char* who) {
  if (basis.path != "square")
    throw RoutingError(std::string(who) + ": needs N = p^{2k} and the zeta_x eigenbasis");
  if (basis.modulus.p <= 3) throw RoutingError(std::string(who) + ": needs p > 3");
}

// Records routed to r, each checked against an interval from `predict`.
template <class Predict>
std::vector<VerificationReport> interval_reports(const Eigenbasis& basis, Route want, const char* name,
                                                 double tol, Predict predict) {
  const auto t0 = Clock::now();
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    const auto& rec = basis.records[i];
    if (route(basis, rec) != want) continue;
    auto r = record_report(name, basis, i);
    const auto [lo, hi] = predict(rec);
    r.lo = lo;
    r.hi = hi;
    r.measured = rec.sup_norm;
    r.tolerance = tol;
    r.settle();
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Entropy

double c_max(const OperatorMatrix& U) { return U.cwiseAbs().maxCoeff(); }

double c_max(const QuantizedOperator& U) { return c_max(U.dense(std::max(U.dimension(), kDenseLimit))); }

VerificationReport eup_check(const StateVector& psi, const OperatorMatrix& U) {
  const auto t0 = Clock::now();
  VerificationReport r;
  r.theorem = "eup";
  r.N = psi.size();
  r.subject = "h(psi) + h(U psi)";
  const StateVector Upsi = U * psi;
  r.measured = shannon_entropy(psi) + shannon_entropy(Upsi);
  r.lo = -2.0 * std::log(c_max(U));
  r.tolerance = 1e-9;
  r.settle();
  r.runtime_s = seconds_since(t0);
  return r;
}

std::vector<VerificationReport> verify_entropy_bound(const Eigenbasis& basis, double tol) {
  const auto t0 = Clock::now();
  std::vector<VerificationReport> out;
  const double bound = 0.5 * std::log(static_cast<double>(basis.modulus.M));
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    auto r = record_report("entropy", basis, i);
    r.lo = bound;
    r.measured = basis.records[i].entropy;
    r.tolerance = tol;
    r.settle();
    if (std::abs(r.measured - bound) < 1e-12) r.note = "equality";
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

// ---------------------------------------------------------------------------
// Routing and closed forms

const char* to_string(Route r) {
  switch (r) {
    case Route::Sup1: return "sup1";
    case Route::Supformel: return "supformel";
    case Route::Ramified: return "ramified";
    case Route::Last: return "last";
    case Route::Unrouted: return "other";
  }
  return "?";
}

Route route(const Eigenbasis& basis, const EigenRecord& rec) {
  const Int p = basis.modulus.p;
  if (basis.path != "square" || p <= 3 || !rec.is_new_form()) return Route::Unrouted;
  const PrimeClass cls = basis.frame.classification(p);
  if (rec.C % p != 0) {
    if (cls == PrimeClass::Ramified) return Route::Ramified;
    const int K = basis.modulus.k / 2;
    if (K == 1 || jacobi_symbol(rec.C, p) == -jacobi_symbol(basis.frame.D, p)) return Route::Sup1;
    return Route::Supformel;
  }
  return cls == PrimeClass::Split ? Route::Last : Route::Unrouted;
}

double norm_factor(Int D, Int p) {
  return 1.0 / std::sqrt(1.0 - static_cast<double>(jacobi_symbol(D, p)) / static_cast<double>(p));
}

std::pair<double, double> sup1_interval(const Eigenbasis& basis) {
  const double n = norm_factor(basis.frame.D, basis.modulus.p);
  const double N = static_cast<double>(basis.modulus.M);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {2.0 * (1.0 - pi2 / (8.0 * N)) * n, 2.0 * n};
}

namespace {

std::pair<double, double> ramified_interval(const Eigenbasis& basis) {
  const double N = static_cast<double>(basis.modulus.M);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {std::sqrt(2.0) * (1.0 - pi2 / (8.0 * N)), std::sqrt(2.0)};
}

}  // namespace

double supformel_value(const Eigenbasis& basis, const EigenRecord& rec) {
  const Int p = basis.modulus.p;
  const int K = basis.modulus.k / 2;
  if (route(basis, rec) != Route::Supformel)
    throw RoutingError("supformel needs a unit-C new form with (C/p) = (D/p) and k > 1");
  const double pd = static_cast<double>(p);
  const double third = static_cast<double>(K) / 3.0;
  const Int p2 = p * p;
  const Int alpha = mul_mod(36, mul_mod(reduce(rec.C, p2), reduce(basis.frame.D, p2), p2), p2);
  double v = 0.0;
  switch (K % 3) {
    case 0: v = std::pow(pd, third); break;
    case 1: v = a_constant(alpha, 2, p) * std::pow(pd, third - 1.0 / 3.0); break;
    default: v = a_constant(alpha % p, 1, p) * std::pow(pd, third - 1.0 / 6.0); break;
  }
  return v * norm_factor(basis.frame.D, p);
}

std::vector<VerificationReport> verify_sup1(const Eigenbasis& basis, double tol) {
  require_square(basis, "sup1");
  if (basis.frame.classification(basis.modulus.p) == PrimeClass::Ramified)
    throw RoutingError("sup1: p divides D");
  const auto iv = sup1_interval(basis);
  return interval_reports(basis, Route::Sup1, "sup1", tol, [&](const EigenRecord&) { return iv; });
}

std::vector<VerificationReport> verify_supformel(const Eigenbasis& basis, double tol) {
  require_square(basis, "supformel");
  if (basis.modulus.k < 4) throw RoutingError("supformel: needs k > 1 (N = p^{2k})");
  if (basis.frame.classification(basis.modulus.p) == PrimeClass::Ramified)
    throw RoutingError("supformel: p divides D");
  return interval_reports(basis, Route::Supformel, "supformel", tol, [&](const EigenRecord& rec) {
    const double v = supformel_value(basis, rec);
    return std::pair{v, v};
  });
}

std::vector<VerificationReport> verify_ramified(const Eigenbasis& basis, double tol) {
  require_square(basis, "ramified");
  if (basis.frame.classification(basis.modulus.p) != PrimeClass::Ramified)
    throw RoutingError("ramified: p does not divide D");
  const auto iv = ramified_interval(basis);
  return interval_reports(basis, Route::Ramified, "ramified", tol, [&](const EigenRecord&) { return iv; });
}

std::vector<VerificationReport> verify_last(const Eigenbasis& basis, double tol) {
  require_square(basis, "last");
  const Int p = basis.modulus.p;
  if (basis.frame.classification(p) != PrimeClass::Split) throw RoutingError("last: D is not a square modulo p");
  const auto t0 = Clock::now();
  const double edge = 1.0 / std::sqrt(1.0 - 1.0 / static_cast<double>(p));
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    const auto& rec = basis.records[i];
    if (route(basis, rec) != Route::Last) continue;
    auto r = record_report("last", basis, i);
    double worst = 0.0;
    for (Int b = 0; b < basis.modulus.M; ++b)
      worst = std::max(worst, std::abs(std::abs(rec.vector(b)) - (b % p == 0 ? 0.0 : edge)));
    r.measured = worst;
    r.hi = 0.0;
    r.tolerance = tol;
    r.note = std::string("max_b ||psi(b)| - prediction|, tag ") + to_string(rec.vpm_tag);
    r.settle();
    if (rec.vpm_tag == VpmTag::None) {
      r.pass = false;
      r.note += " (missing V+/V- tag)";
    }
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

std::vector<VerificationReport> verify_supupp(const Eigenbasis& basis, double tol) {
  const auto t0 = Clock::now();
  const double bound = std::pow(static_cast<double>(basis.modulus.M), 0.25);
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    auto r = record_report("supupp", basis, i);
    r.hi = bound;
    r.measured = basis.records[i].sup_norm;
    r.tolerance = tol;
    r.settle();
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

std::vector<VerificationReport> verify_supupp(const std::vector<TensorEigenvector>& vectors, Int N,
                                              double tol) {
  const auto t0 = Clock::now();
  const double bound = std::pow(static_cast<double>(N), 0.25);
  std::vector<VerificationReport> out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    VerificationReport r;
    r.theorem = "supupp";
    r.N = N;
    r.c_class = "none";
    std::string idx;
    for (auto j : vectors[i].factor_index) idx += (idx.empty() ? "" : "x") + std::to_string(j);
    char buf[32];
    std::snprintf(buf, sizeof buf, "tensor %06zu ", i);
    r.subject = buf + idx;
    r.hi = bound;
    r.measured = vectors[i].sup_norm;
    r.tolerance = tol;
    r.settle();
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

VerificationReport verify_satsen(const TorusMatrix& A, const PrimePowerModulus& N, double tol) {
  const auto t0 = Clock::now();
  VerificationReport r;
  r.theorem = "satsen";
  r.N = N.M;
  r.p = N.p;
  r.k = N.k;
  r.c_class = "none";
  r.tolerance = tol;
  const int m = N.k / 2;
  r.lo = std::pow(static_cast<double>(N.p), m / 2.0);
  const auto U = quantize(A.reduced(N.M), N);

  StateVector best;
  if (N.k % 2 == 0) {
    best = storfunktion(N) * std::sqrt(static_cast<double>(ipow(N.p, m)));
    r.subject = "storfunktion";
  } else {
    const auto lower_mod = PrimePowerModulus::make(N.p, N.k - 2 * m);
    const auto lower = compute_eigenbasis(normalize_to_torus(A.reduced(lower_mod.M)), lower_mod);
    const auto lifted = lift_eigenvectors(lower, N, m);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < lifted.size(); ++i)
      if (sup_norm(lifted[i]) > sup_norm(lifted[arg])) arg = i;
    best = lifted[arg];
    r.subject = "lifted eigenvector " + std::to_string(arg) + " from p^" + std::to_string(lower_mod.k);
  }
  r.d_class = to_string(classify(normalize_to_torus(A.reduced(N.M)).D, N.p));
  r.measured = sup_norm(best);
  r.settle();

  const StateVector Ub = U.apply(best);
  const Complex lambda = best.dot(Ub) / best.squaredNorm();
  const double residual = (Ub - lambda * best).cwiseAbs().maxCoeff();
  const bool member = schwartz_membership(best, N, N.k - m, m, 1e-9);
  char buf[128];
  std::snprintf(buf, sizeof buf, "eigen residual %.3g, |lambda| = %.12f, in S_k(k-%d,%d): %s", residual,
                std::abs(lambda), m, m, member ? "yes" : "no");
  r.note = buf;
  if (residual > 1e-9 || !member) r.pass = false;
  r.runtime_s = seconds_since(t0);
  return r;
}

std::vector<VerificationReport> verify_sats_containment(const Eigenbasis& basis, double tol) {
  require_square(basis, "sats");
  const auto t0 = Clock::now();
  std::vector<VerificationReport> out;
  const Int p = basis.modulus.p;
  if (basis.frame.classification(p) == PrimeClass::Ramified) throw RoutingError("sats: p divides D");
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    const auto& rec = basis.records[i];
    if (rec.C % p == 0) continue;
    auto r = record_report("sats", basis, i);
    double worst = 0.0;
    int counts[3] = {0, 0, 0};
    for (Int b = 0; b < basis.modulus.M; ++b) {
      const auto pred = predict_value(basis, rec, b);
      ++counts[static_cast<int>(pred.kind)];
      const double v = std::abs(rec.vector(b));
      worst = std::max({worst, pred.lo - v, v - pred.hi});
    }
    r.measured = std::max(worst, 0.0);
    r.hi = 0.0;
    r.tolerance = tol;
    r.note = "distance outside predicted set; vanishing/sats1/sats2 points " + std::to_string(counts[0]) + "/" +
             std::to_string(counts[1]) + "/" + std::to_string(counts[2]);
    r.settle();
    out.push_back(std::move(r));
  }
  const double dt = seconds_since(t0);
  for (auto& r : out) r.runtime_s = dt;
  return out;
}

// ---------------------------------------------------------------------------
// Bands

BandSummary band_summary(const Eigenbasis& basis) {
  BandSummary s;
  const Int p = basis.modulus.p;
  const bool square = basis.path == "square";
  const PrimeClass cls = basis.frame.classification(p);
  const double N = static_cast<double>(basis.modulus.M);
  std::pair<double, double> band{0.0, 0.0};
  if (square) band = cls == PrimeClass::Ramified ? ramified_interval(basis) : sup1_interval(basis);

  bool band_hit = false;
  std::vector<double> others;
  for (std::size_t i = 0; i < basis.records.size(); ++i) {
    const auto& rec = basis.records[i];
    if (!rec.is_new_form()) continue;
    const Route rt = route(basis, rec);
    s.points.push_back({i, rec.eigenphase, rec.sup_norm, to_string(rt)});
    if (!square || rec.C % p == 0) continue;
    if (rec.sup_norm >= band.first - 10.0 / N && rec.sup_norm <= band.second + 10.0 / N) band_hit = true;
    else others.push_back(rec.sup_norm);
  }
  std::sort(others.begin(), others.end());
  if (band_hit) s.levels.push_back(band.second);
  for (double v : others)
    if (s.levels.size() == static_cast<std::size_t>(band_hit) || std::abs(v - s.levels.back()) > 1e-6 * v)
      s.levels.push_back(v);
  s.distinct = static_cast<int>(s.levels.size());

  if (square) {
    const char* name = cls == PrimeClass::Ramified ? "ramified" : "sup1";
    s.predicted.emplace_back(std::string(name) + " upper", band.second);
    s.predicted.emplace_back(std::string(name) + " lower", band.first);
    std::vector<double> formel;
    for (const auto& rec : basis.records)
      if (route(basis, rec) == Route::Supformel) {
        const double v = supformel_value(basis, rec);
        if (std::none_of(formel.begin(), formel.end(), [&](double w) { return std::abs(w - v) < 1e-9; }))
          formel.push_back(v);
      }
    std::sort(formel.begin(), formel.end());
    for (double v : formel) s.predicted.emplace_back("supformel", v);
    if (cls == PrimeClass::Split) s.predicted.emplace_back("last", 1.0 / std::sqrt(1.0 - 1.0 / static_cast<double>(p)));
  }
  return s;
}

}  // namespace catmap
