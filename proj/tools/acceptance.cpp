// Exit gate: one PASS/FAIL line per acceptance criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "catmap/expsum.hpp"
#include "catmap/report.hpp"
#include "commands.hpp"

using namespace catmap;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::mt19937_64 rng(20240611);

Int uniform(Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng); }

TorusMatrix random_sl2(Int N) {
  for (;;) {
    const Int a = uniform(0, N - 1), b = uniform(0, N - 1), c = uniform(0, N - 1);
    if (gcd(a, N) != 1) continue;
    return TorusMatrix::make(a, b, c, mul_mod(inverse_mod(a, N), add_mod(1, mul_mod(b, c, N), N), N), N);
  }
}

StateVector random_state(Int N) {
  std::normal_distribution<double> g;
  StateVector psi(N);
  for (Int i = 0; i < N; ++i) psi(i) = Complex(g(rng), g(rng));
  return normalized(psi);
}

double max_abs(const StateVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Eigenbasis default_basis(Int p, int k) {
  const auto mod = PrimePowerModulus::make(p, k);
  return compute_eigenbasis(normalize_to_torus(TorusMatrix::make(1, 2, 2, 5, mod.M)), mod, 4);
}

double worst_violation(const std::vector<VerificationReport>& reports) {
  double w = 0.0;
  for (const auto& r : reports) w = std::max(w, r.pass ? 0.0 : std::max(r.violation(), 1e-300));
  return w;
}

bool passes(const std::vector<VerificationReport>& reports) { return !reports.empty() && all_pass(reports); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), dt);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// max_t |sum_z e((alpha z^3 + t z)/p)| / sqrt(p), straight from the definition.
double a1_scan(Int alpha, Int p) {
  double best = 0.0;
  for (Int t = 0; t < p; ++t) {
    double re = 0.0, im = 0.0;
    for (Int z = 0; z < p; ++z) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>((alpha * z % p * z % p * z + t * z) % p) / p;
      re += std::cos(ang);
      im += std::sin(ang);
    }
    best = std::max(best, std::hypot(re, im));
  }
  return best / std::sqrt(static_cast<double>(p));
}

std::string slurp(const fs::path& f) {
  std::ifstream is(f, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "representation property", [] {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (Int N : {25, 625}) {
      const auto mod = PrimePowerModulus::make(5, N == 25 ? 2 : 4);
      const auto rep = std::make_shared<const WeilRepresentation>(mod);
      for (int i = 0; i < 100; ++i) {
        const auto B1 = random_sl2(N), B2 = random_sl2(N);
        const OperatorMatrix lhs = quantize(B1 * B2, rep).dense();
        const OperatorMatrix rhs = quantize(B1, rep).dense() * quantize(B2, rep).dense();
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    return Outcome{worst < 1e-9 && dt < 30.0, "max entry error " + sci(worst) + " over 200 pairs, " + sci(dt) + " s"};
  });

  criterion(2, "zeta action exactness", [] {
    const auto mod = PrimePowerModulus::make(5, 4);
    const auto rep = std::make_shared<const WeilRepresentation>(mod);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto B = random_sl2(625);
      const ZetaIndex x{uniform(0, 24), uniform(0, 24)};
      const auto img = zeta_action(B, x);
      // independent phase: e(r (x1' x2' - x1 x2) / N) with x' = B x
      const auto [y1, y2] = B.apply(x.x1, x.x2);
      const Int r = inverse_mod(2, 625);
      const Int phase = mul_mod(r, sub_mod(mul_mod(y1, y2, 625), mul_mod(x.x1, x.x2, 625), 625), 625);
      if (img.phase != phase || img.x != ZetaIndex{y1, y2}) return Outcome{false, "phase or index mismatch"};
      const StateVector lhs = quantize(B, rep).apply(zeta_state(x, mod));
      const StateVector rhs = unit_root(phase, 625) * zeta_state({y1, y2}, mod);
      worst = std::max(worst, max_abs(lhs - rhs));
    }
    return Outcome{worst < 1e-10, "50 random (B, x), max error " + sci(worst)};
  });

  criterion(3, "dim V_C", [] {
    int cases = 0, bad = 0;
    for (Int p : {5, 7})
      for (int k : {1, 2})
        for (Int D : {2, 3, 4}) {
          const auto mod = PrimePowerModulus::make(p, k);
          const Int M = mod.M;
          std::vector<Int> count(M, 0);
          for (Int x1 = 0; x1 < M; ++x1)
            for (Int x2 = 0; x2 < M; ++x2) ++count[reduce(-(x1 * x1 - D * x2 * x2), M)];
          const Int expected = M - jacobi_symbol(D, p) * (M / p);
          for (Int C = 1; C < M; ++C) {
            if (C % p == 0) continue;
            ++cases;
            bad += count[C] != expected || vc_dimension(C, D, mod) != expected;
          }
        }
    return Outcome{bad == 0, std::to_string(cases) + " (p, k, D, C) cases, " + std::to_string(bad) + " mismatches"};
  });

  criterion(4, "storfunktion sup and invariance", [] {
    const auto mod = PrimePowerModulus::make(5, 4);
    const StateVector f = normalized(storfunktion(mod));
    const double sup_err = std::abs(sup_norm(f) - 5.0);
    double resid = 0.0;
    for (int i = 0; i < 5; ++i) resid = std::max(resid, max_abs(quantize(random_sl2(625), mod).apply(f) - f));
    return Outcome{sup_err < 1e-12 && resid < 1e-10,
                   "|sup - 5| = " + sci(sup_err) + ", max |Uf - f| = " + sci(resid) + " over 5 matrices"};
  });

  criterion(5, "T_1 intertwining at (5, 4, 1)", [] {
    const auto m625 = PrimePowerModulus::make(5, 4), m25 = PrimePowerModulus::make(5, 2);
    double inter = 0.0, unit = 0.0;
    for (int i = 0; i < 20; ++i) {
      // random element of S_4(3, 1): supported on 5Z, constant modulo 125
      const StateVector g = random_state(125);
      StateVector s = StateVector::Zero(625);
      for (Int y = 0; y < 625; y += 5) s(y) = g(y % 125);
      const auto B = random_sl2(625);
      const StateVector t = t_m_forward(s, m625, 1);
      unit = std::max({unit, std::abs(l2_norm(t) - l2_norm(s)), max_abs(t_m_inverse(t, m625, 1) - s)});
      const StateVector lhs = quantize(B, m625).apply(s);
      const StateVector rhs = t_m_inverse(quantize(B.reduced(25), m25).apply(t), m625, 1);
      inter = std::max(inter, max_abs(lhs - rhs));
    }
    return Outcome{inter < 1e-10 && unit < 1e-12,
                   "intertwining residual " + sci(inter) + ", unitarity defect " + sci(unit)};
  });

  criterion(6, "entropy bound, sharpness, c(U)", [] {
    bool ok = true;
    std::string detail;
    for (auto [p, k] : {std::pair<Int, int>{5, 2}, {5, 4}, {7, 4}}) {
      const auto basis = default_basis(p, k);
      const auto reports = verify_entropy_bound(basis, 1e-9);
      const Int N = basis.modulus.M;
      const double eq = std::abs(shannon_entropy(normalized(storfunktion(basis.modulus))) - 0.5 * std::log(double(N)));
      const double c = c_max(quantize(TorusMatrix::make(1, 2, 2, 5, N), basis.modulus));
      const double cerr = std::abs(c - 1.0 / std::sqrt(double(N)));
      ok = ok && passes(reports) && reports.size() == std::size_t(N) && eq < 1e-12 && cerr < 1e-10;
      detail += "N=" + std::to_string(N) + ": " + std::to_string(reports.size()) + " vectors, equality " + sci(eq) +
                ", c err " + sci(cerr) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(7, "exponential sums", [] {
    const auto t0 = Clock::now();
    long mism = 0, checked = 0;
    for (int n = 1; n <= 4; ++n) {
      const auto a = audit_reductions(5, n, 1e-9, 4);
      mism += a.mismatches;
      checked += a.checked;
    }
    double closed = 0.0;
    for (Int p : {5, 7})
      for (int n = 1; n <= 5; ++n)
        for (Int alpha : cube_class_representatives(p))
          closed = std::max(closed, std::abs(expsats_sup(alpha, n, p) - expsats_sup_brute(alpha, n, p, 4)));
    bool bounds = true;
    for (Int p : {5, 7, 11, 13})
      for (int n : {1, 2}) {
        std::vector<double> vals;
        const Int M = ipow(p, n);
        for (Int alpha = 1; alpha < M; ++alpha)
          if (alpha % p) vals.push_back(a_constant(alpha, n, p));
        std::sort(vals.begin(), vals.end());
        int distinct = 0;
        for (std::size_t i = 0; i < vals.size(); ++i) distinct += i == 0 || vals[i] - vals[i - 1] > 1e-9;
        const bool lo = n == 1 ? vals.front() >= 1.0 - 1e-9 : vals.front() > std::sqrt(2.0);
        bounds = bounds && lo && vals.back() <= 2.0 + 1e-9 && distinct <= 3;
      }
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    return Outcome{mism == 0 && closed < 1e-9 && bounds && dt < 120.0,
                   std::to_string(checked) + " sums audited, " + std::to_string(mism) + " mismatches; closed vs brute " +
                       sci(closed) + "; A bounds " + (bounds ? "hold" : "violated") + "; " + sci(dt) + " s"};
  });

  criterion(8, "sup1 interval", [] {
    std::string detail;
    bool ok = true;
    for (Int p : {5, 7}) {
      const auto reports = verify_sup1(default_basis(p, 4), 1e-9);
      ok = ok && passes(reports);
      detail += std::to_string(p) + "^4: " + std::to_string(reports.size()) + " vectors, worst " +
                sci(worst_violation(reports)) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(9, "supformel closed form at 5^4", [] {
    const auto basis = default_basis(5, 4);
    const Int D = basis.frame.D;
    const double norm = 1.0 / std::sqrt(1.0 - jacobi_symbol(D, 5) / 5.0);
    double worst = 0.0;
    int n = 0;
    for (const auto& rec : basis.records) {
      if (route(basis, rec) != Route::Supformel) continue;
      ++n;
      const Int alpha = reduce(36 * rec.C * D, 5);
      worst = std::max(worst, std::abs(rec.sup_norm - a1_scan(alpha, 5) * std::sqrt(5.0) * norm));
    }
    const auto reports = verify_supformel(basis, 1e-6);
    return Outcome{n > 0 && worst < 1e-6 && passes(reports),
                   std::to_string(n) + " vectors against the scanned constant, max error " + sci(worst)};
  });

  criterion(10, "split V+- pointwise values", [] {
    std::string detail;
    bool ok = true;
    const double level = 1.0 / std::sqrt(1.0 - 1.0 / 7.0);
    for (int k : {2, 4}) {
      const auto basis = default_basis(7, k);
      double off = 0.0, on = 0.0;
      int n = 0;
      for (const auto& rec : basis.records) {
        if (route(basis, rec) != Route::Last) continue;
        ++n;
        for (Int b = 0; b < basis.modulus.M; ++b) {
          const double v = std::abs(rec.vector(b));
          if (b % 7) off = std::max(off, std::abs(v - level));
          else on = std::max(on, v);
        }
      }
      const auto reports = verify_last(basis, 1e-9);
      ok = ok && n > 0 && off < 1e-9 && on < 1e-9 && passes(reports);
      detail += "7^" + std::to_string(k) + ": " + std::to_string(n) + " forms, off 7Z " + sci(off) + ", on 7Z " +
                sci(on) + "; ";
    }
    return Outcome{ok, detail};
  });

  criterion(11, "sup <= N^{1/4}", [] {
    std::string detail;
    bool ok = true;
    for (Int p : {5, 7}) {
      const auto reports = verify_supupp(default_basis(p, 4), 1e-9);
      ok = ok && passes(reports) && reports.size() == std::size_t(ipow(p, 4));
      detail += std::to_string(p) + "^4 " + std::to_string(reports.size()) + " ok; ";
    }
    std::vector<Eigenbasis> factors{default_basis(5, 2), default_basis(7, 2)};
    const auto tensor = tensor_eigenbasis(factors, 1225);
    const auto reports = verify_supupp(tensor, 1225, 1e-9);
    ok = ok && passes(reports) && reports.size() == 1225;
    double top = 0.0;
    for (const auto& t : tensor) top = std::max(top, t.sup_norm);
    detail += "25*49: " + std::to_string(reports.size()) + " product vectors, max sup " + sci(top) + " vs " +
              sci(std::pow(1225.0, 0.25));
    return Outcome{ok, detail};
  });

  criterion(12, "new-form sup bands and pipeline", [] {
    std::string detail;
    bool ok = true;
    for (Int p : {5, 7}) {
      const auto bands = band_summary(default_basis(p, 4));
      ok = ok && bands.distinct >= 1 && bands.distinct <= 4;
      detail += std::to_string(p) + "^4: " + std::to_string(bands.distinct) + " levels; ";
    }
    const fs::path root = fs::temp_directory_path() / "catmap_acceptance";
    fs::remove_all(root);
    cli::RunConfig c;
    c.p = 7;
    c.k = 4;
    c.jobs = 4;
    std::ostringstream sink;
    const auto t0 = Clock::now();
    c.out = (root / "a").string();
    const int rc = cli::run(c, sink);
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    c.out = (root / "b").string();
    const int rc2 = cli::run(c, sink);
    int compared = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
      const auto ext = e.path().extension();
      if (ext != ".csv" && ext != ".svg") continue;
      ++compared;
      differ += slurp(e.path()) != slurp(root / "b" / e.path().filename());
    }
    ok = ok && rc == 0 && rc2 == 0 && compared >= 5 && differ == 0 && dt < 600.0;
    detail += "7^4 pipeline exit " + std::to_string(rc) + " in " + sci(dt) + " s, " + std::to_string(compared) +
              " CSV/SVG files, " + std::to_string(differ) + " differ between runs";
    fs::remove_all(root);
    return Outcome{ok, detail};
  });

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
