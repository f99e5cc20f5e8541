#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "catmap/expsum.hpp"
#include "catmap/report.hpp"

namespace catmap::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Largest N whose eigenvector table (N^2 amplitudes) the eigen suites build.
constexpr Int kEigenLimit = 5000;
// Largest odd-exponent N for the dense spectral path.
constexpr Int kGeneralLimit = 1500;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool uses_eigenbasis(const std::string& suite) {
  return suite == "eigen" || suite == "figure" || suite == "verify" || suite == "all";
}

StateVector random_state(std::mt19937_64& gen, Int N) {
  std::normal_distribution<double> g;
  StateVector psi(N);
  for (Int i = 0; i < N; ++i) psi(i) = Complex(g(gen), g(gen));
  return normalized(psi);
}

TorusMatrix random_sl2(std::mt19937_64& gen, Int N) {
  std::uniform_int_distribution<Int> u(0, N - 1);
  for (;;) {
    const Int a = u(gen), c = u(gen);
    if (gcd(a, N) == 1) {
      const Int b = u(gen);
      return TorusMatrix::make(a, b, c, mul_mod(inverse_mod(a, N), add_mod(1, mul_mod(b, c, N), N), N), N);
    }
    if (gcd(c, N) == 1) {
      const Int d = u(gen);
      return TorusMatrix::make(a, mul_mod(inverse_mod(c, N), sub_mod(mul_mod(a, d, N), 1, N), N), c, d, N);
    }
  }
}

VerificationReport make_report(const std::string& theorem, Int N, const std::string& subject, double measured,
                               std::optional<double> lo, std::optional<double> hi, double tol) {
  VerificationReport r;
  r.theorem = theorem;
  r.N = N;
  r.subject = subject;
  r.measured = measured;
  r.lo = lo;
  r.hi = hi;
  r.tolerance = tol;
  r.settle();
  return r;
}

void tag(std::vector<VerificationReport>& reports, const Session& s, Clock::time_point t0) {
  const double dt = seconds_since(t0);
  const auto& c = s.config();
  for (auto& r : reports) {
    if (r.runtime_s == 0.0) r.runtime_s = dt;
    if (r.p == 0 && s.N() == ipow(c.p, c.k) && c.n == 0) {
      r.p = c.p;
      r.k = c.k;
    }
  }
}

void append(std::vector<VerificationReport>& dst, std::vector<VerificationReport> src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

// Unit-norm operators applied as functions of a state, for either kind of N.
struct AnyOperator {
  std::optional<QuantizedOperator> single;
  std::optional<TensorOperator> tensor;
  StateVector operator()(const StateVector& v) const { return single ? single->apply(v) : tensor->apply(v); }
  OperatorMatrix dense(Int limit) const { return single ? single->dense(limit) : tensor->dense(limit); }
};

AnyOperator make_operator(const Session& s, const TorusMatrix& B) {
  AnyOperator op;
  if (is_prime_power(s.config())) op.single = quantize(B, PrimePowerModulus::make(s.config().p, s.config().k));
  else op.tensor = tensor_quantize(B);
  return op;
}

}  // namespace

Int modulus_of(const RunConfig& c) { return c.n > 0 ? c.n : ipow(c.p, c.k); }

bool is_prime_power(const RunConfig& c) { return c.n == 0; }

void validate(const RunConfig& c) {
  if (std::find(kSuites.begin(), kSuites.end(), c.suite) == kSuites.end())
    throw ConfigError("unknown suite '" + c.suite + "' (quantize|eigen|figure|verify|expsum|all)");
  if (c.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (c.tol && !(*c.tol >= 0.0)) throw ConfigError("--tol must be a non-negative number");
  if (c.suite == "expsum" || c.suite == "all") {
    if (!is_prime(c.p) || c.p <= 3) throw ConfigError("expsum needs a prime p > 3 (got --p " + std::to_string(c.p) + ")");
  }
  if (c.suite == "expsum") return;

  Int N;
  if (c.n > 0) {
    if (c.n < 3) throw ConfigError("--n must be at least 3");
    if (c.n % 2 == 0)
      throw UnsupportedModulusError("even N = " + std::to_string(c.n) +
                                    ": only the 2-adic generator operators exist, U_N(A) is not provided");
    if (c.suite == "figure") throw ConfigError("figure needs a prime power N (use --p/--k)");
    N = c.n;
  } else {
    if (!is_prime(c.p)) throw ConfigError("--p must be prime (got " + std::to_string(c.p) + ")");
    if (c.k < 1) throw ConfigError("--k must be at least 1");
    if (c.p == 2)
      throw UnsupportedModulusError("p = 2: only the 2-adic generator operators exist, U_N(A) is not provided");
    if (c.k * std::log2(static_cast<double>(c.p)) > 30) throw ConfigError("p^k is too large");
    N = ipow(c.p, c.k);
  }
  const auto& m = c.matrix;
  const auto adm = check_admissible(m[0], m[1], m[2], m[3], N);
  if (!adm.admissible) {
    std::string msg = "matrix " + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2]) +
                      "," + std::to_string(m[3]) + " is not admissible:";
    for (const auto& f : adm.failures) msg += "\n  - " + f;
    throw ConfigError(msg);
  }
  if (uses_eigenbasis(c.suite)) {
    if (gcd(reduce(m[2], N), N) != 1)
      throw UpperTriangularError("lower-left entry " + std::to_string(m[2]) +
                                 " is not a unit modulo every prime of N; the Hecke frame is undefined");
    if (N > kEigenLimit)
      throw ConfigError("N = " + std::to_string(N) + " exceeds " + std::to_string(kEigenLimit) +
                        " for the eigen suites (the eigenvector table has N^2 amplitudes)");
    if (is_prime_power(c) && c.k % 2 == 1 && N > kGeneralLimit)
      throw ConfigError("odd exponent with N = " + std::to_string(N) + " > " + std::to_string(kGeneralLimit) +
                        ": the dense spectral path is cubic in N");
  }
}

// ---------------------------------------------------------------------------
// Session

Session::Session(RunConfig c) : config_(std::move(c)), N_(modulus_of(config_)) {}

TorusMatrix Session::A() const {
  const auto& m = config_.matrix;
  return TorusMatrix::make(m[0], m[1], m[2], m[3], N_);
}

const Eigenbasis& Session::basis() {
  if (!is_prime_power(config_)) throw ConfigError("this suite needs a prime power N");
  if (!basis_) {
    const auto mod = PrimePowerModulus::make(config_.p, config_.k);
    basis_ = compute_eigenbasis(normalize_to_torus(A()), mod, config_.jobs);
  }
  return *basis_;
}

const std::vector<TensorEigenvector>& Session::tensor() {
  if (!tensor_) {
    std::vector<Eigenbasis> factors;
    for (const auto& f : crt_split(N_))
      factors.push_back(compute_eigenbasis(normalize_to_torus(A().reduced(f.M)), f, config_.jobs));
    tensor_ = tensor_eigenbasis(factors, N_);
  }
  return *tensor_;
}

std::string Session::path(const std::string& file) const { return (fs::path(config_.out) / file).string(); }

// ---------------------------------------------------------------------------
// Suites

SuiteResult cmd_quantize(Session& s) {
  const auto t0 = Clock::now();
  SuiteResult res;
  const Int N = s.N();
  std::mt19937_64 gen(s.config().seed);
  const auto U = make_operator(s, s.A());

  if (N <= kDenseLimit) {
    const OperatorMatrix M = U.dense(kDenseLimit);
    std::ofstream os(s.path("operator.csv"));
    write_operator_csv(os, M);
    res.files.push_back("operator.csv");
    const double defect = (M.adjoint() * M - OperatorMatrix::Identity(N, N)).cwiseAbs().maxCoeff();
    res.reports.push_back(make_report("unitarity", N, "max |U^* U - I|", defect, std::nullopt, 0.0, s.tol_or(1e-10)));
  } else {
    if (s.config().suite == "quantize")
      throw ConfigError("N = " + std::to_string(N) + " exceeds the dense limit " + std::to_string(kDenseLimit) +
                        "; no operator dump is written. U_N(A) is available in action mode "
                        "(QuantizedOperator::apply / TensorOperator::apply)");
    double defect = 0.0;
    for (int i = 0; i < 3; ++i) {
      const StateVector a = random_state(gen, N), b = random_state(gen, N);
      defect = std::max(defect, std::abs(inner_product(U(a), U(b)) - inner_product(a, b)));
    }
    auto r = make_report("unitarity", N, "max |<Ua,Ub> - <a,b>| over 3 random pairs", defect, std::nullopt, 0.0,
                         s.tol_or(1e-10));
    r.note = "action mode, no dense dump above N = 700";
    res.reports.push_back(r);
  }

  // U(A B) = U(A) U(B) on random states.
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto B = random_sl2(gen, N);
    const StateVector v = random_state(gen, N);
    const StateVector lhs = make_operator(s, s.A() * B)(v);
    const StateVector rhs = U(make_operator(s, B)(v));
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  res.reports.push_back(make_report("representation", N, "max |U(AB)v - U(A)U(B)v|, 4 random B", worst,
                                    std::nullopt, 0.0, s.tol_or(1e-9)));
  tag(res.reports, s, t0);
  return res;
}

SuiteResult cmd_eigenbasis(Session& s) {
  const auto t0 = Clock::now();
  SuiteResult res;
  const Int N = s.N();
  const double tol = s.tol_or(1e-9);
  std::mt19937_64 gen(s.config().seed + 1);

  if (!is_prime_power(s.config())) {
    const auto& tensor = s.tensor();
    std::ofstream os(s.path("tensor_eigen.csv"));
    os << "index,factor_index,sup_norm\n";
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      std::string idx;
      for (auto j : tensor[i].factor_index) idx += (idx.empty() ? "" : ":") + std::to_string(j);
      os << i << ',' << idx << ',' << fmt(tensor[i].sup_norm) << '\n';
    }
    res.files.push_back("tensor_eigen.csv");
    res.reports.push_back(make_report("completeness", N, "number of product eigenvectors",
                                      static_cast<double>(tensor.size()), static_cast<double>(N),
                                      static_cast<double>(N), 0.0));
    tag(res.reports, s, t0);
    return res;
  }

  const auto& basis = s.basis();
  {
    std::ofstream os(s.path("eigenrecords.csv"));
    write_records_csv(os, basis.records);
    std::ofstream js(s.path("eigenrecords.json"));
    js << records_json(basis.records).dump(1) << '\n';
    res.files.push_back("eigenrecords.csv");
    res.files.push_back("eigenrecords.json");
  }
  const auto n = static_cast<Int>(basis.records.size());
  res.reports.push_back(make_report("completeness", N, "number of eigenvectors (" + basis.path + " path)",
                                    static_cast<double>(n), static_cast<double>(N), static_cast<double>(N), 0.0));

  // Orthonormality: full Gram matrix when small, sampled pairs otherwise.
  double gram = 0.0;
  if (N <= kDenseLimit) {
    OperatorMatrix V(N, n);
    for (Int i = 0; i < n; ++i) V.col(i) = basis.records[i].vector;
    gram = (V.adjoint() * V / static_cast<double>(N) - OperatorMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  } else {
    std::uniform_int_distribution<Int> u(0, n - 1);
    for (const auto& rec : basis.records) gram = std::max(gram, std::abs(l2_norm(rec.vector) - 1.0));
    for (int t = 0; t < 256; ++t) {
      const Int i = u(gen), j = u(gen);
      if (i == j) continue;
      gram = std::max(gram, std::abs(inner_product(basis.records[i].vector, basis.records[j].vector)));
    }
  }
  res.reports.push_back(make_report("orthonormality",
                                    N, N <= kDenseLimit ? "max |Gram - I|" : "norms + 256 sampled pairs", gram,
                                    std::nullopt, 0.0, tol));

  // Joint eigenvector residuals at random torus elements.
  const auto& pts = basis.torus.points();
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  std::vector<TorusPoint> probes{basis.torus.generator()};
  for (int t = 0; t < 3; ++t) probes.push_back(pts[pick(gen)]);
  std::vector<std::size_t> sample(basis.records.size());
  for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
  if (N > kDenseLimit) {
    std::shuffle(sample.begin(), sample.end(), gen);
    sample.resize(24);
    std::sort(sample.begin(), sample.end());
  }
  double resid = 0.0;
  for (const auto& x : probes) {
    const auto U = quantize(basis.hecke_matrix(x), basis.modulus);
    for (auto i : sample) {
      const auto& rec = basis.records[i];
      Complex lambda;
      if (basis.path == "square") {
        const auto [num, den] = record_eigenvalue(basis, rec, x);
        lambda = unit_root(num, den);
      } else {
        lambda = rec.vector.dot(U.apply(rec.vector)) / rec.vector.squaredNorm();
      }
      resid = std::max(resid, (U.apply(rec.vector) - lambda * rec.vector).cwiseAbs().maxCoeff());
    }
  }
  res.reports.push_back(make_report("joint_eigen", N,
                                    std::to_string(probes.size()) + " torus elements x " +
                                        std::to_string(sample.size()) + " records",
                                    resid, std::nullopt, 0.0, s.tol_or(1e-8)));
  if (basis.path == "general") {
    auto r = make_report("representation_gate", N, "max |M^ord - mu I| at the torus generator",
                         basis.scalar_defect, std::nullopt, 0.0, s.tol_or(1e-8));
    r.note = "odd exponent: spectral path";
    res.reports.push_back(r);
  }
  tag(res.reports, s, t0);
  return res;
}

SuiteResult cmd_figure(Session& s) {
  const auto t0 = Clock::now();
  SuiteResult res;
  const auto& basis = s.basis();
  const auto bands = band_summary(basis);
  if (bands.points.empty()) throw std::runtime_error("figure: the eigenbasis has no new forms");
  {
    std::ofstream os(s.path("figure.csv"));
    write_figure_csv(os, bands);
    std::ofstream svg(s.path("figure.svg"));
    const auto& m = s.config().matrix;
    write_figure_svg(svg, bands,
                     "sup norms of new forms, N = " + std::to_string(s.N()) + " = " + std::to_string(s.config().p) +
                         "^" + std::to_string(s.config().k) + ", A = [[" + std::to_string(m[0]) + "," +
                         std::to_string(m[1]) + "],[" + std::to_string(m[2]) + "," + std::to_string(m[3]) + "]]");
    res.files.push_back("figure.csv");
    res.files.push_back("figure.svg");
  }
  if (basis.path == "square") {
    std::string levels;
    for (double v : bands.levels) levels += (levels.empty() ? "" : " ") + fmt(v);
    auto r = make_report("bands", s.N(), "distinct unit-C new-form sup values", bands.distinct, std::nullopt, 4.0, 0.0);
    r.note = "levels: " + levels + "; p | C new forms plotted, not counted";
    res.reports.push_back(r);
  }
  tag(res.reports, s, t0);
  return res;
}

SuiteResult cmd_verify(Session& s) {
  const auto t0 = Clock::now();
  SuiteResult res;
  auto& out = res.reports;
  if (!is_prime_power(s.config())) {
    auto reports = verify_supupp(s.tensor(), s.N(), s.tol_or(1e-9));
    const auto factors = crt_split(s.N());
    if (!std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.k % 2 == 0; })) {
      // N^{1/4} is only claimed when every factor is an even power; otherwise the unit l2 norm bound.
      for (auto& r : reports) {
        r.theorem = "sup_trivial";
        r.hi = std::sqrt(static_cast<double>(s.N()));
        r.note = "odd exponent factor";
        r.settle();
      }
    }
    append(out, std::move(reports));
    tag(out, s, t0);
    return res;
  }
  const auto& basis = s.basis();
  const Int p = basis.modulus.p;
  const PrimeClass cls = basis.frame.classification(p);
  append(out, verify_entropy_bound(basis, s.tol_or(1e-9)));
  out.push_back(verify_satsen(s.A(), basis.modulus, s.tol_or(1e-9)));

  // c(U) = N^{-1/2} for the unit lower-left entry, and the uncertainty principle on a few eigenvectors.
  if (s.N() <= 2401) {
    const auto U = quantize(s.A(), basis.modulus);
    const OperatorMatrix M = U.dense(std::max<Int>(s.N(), kDenseLimit));
    const double c = c_max(M);
    out.push_back(make_report("c_max", s.N(), "max |U_ij| against N^{-1/2}", c,
                              1.0 / std::sqrt(static_cast<double>(s.N())),
                              1.0 / std::sqrt(static_cast<double>(s.N())), s.tol_or(1e-10)));
    const std::size_t stride = std::max<std::size_t>(1, basis.records.size() / 8);
    for (std::size_t i = 0; i < basis.records.size(); i += stride) {
      auto r = eup_check(basis.records[i].vector, M);
      r.subject = "eigenvector " + std::to_string(i);
      r.tolerance = s.tol_or(1e-9);
      r.settle();
      out.push_back(r);
    }
  }

  if (basis.path == "square" && p > 3) {
    append(out, verify_supupp(basis, s.tol_or(1e-9)));
    if (cls == PrimeClass::Ramified) {
      append(out, verify_ramified(basis, s.tol_or(1e-9)));
    } else {
      append(out, verify_sup1(basis, s.tol_or(1e-9)));
      if (basis.modulus.k >= 4) append(out, verify_supformel(basis, s.tol_or(1e-6)));
      append(out, verify_sats_containment(basis, s.tol_or(1e-8)));
    }
    if (cls == PrimeClass::Split) append(out, verify_last(basis, s.tol_or(1e-9)));
  }
  tag(out, s, t0);
  return res;
}

SuiteResult cmd_expsum(Session& s) {
  const auto t0 = Clock::now();
  SuiteResult res;
  const Int p = s.config().p;
  const int nmax = std::clamp(s.config().k, 1, 5);
  const double tol = s.tol_or(1e-9);
  std::vector<ExpsumRow> rows;
  for (int n = 1; n <= nmax; ++n) {
    const Int M = ipow(p, n);
    for (Int alpha : cube_class_representatives(p)) {
      ExpsumRow row{p, n, alpha, 0.0, expsats_sup(alpha, n, p), std::nan("")};
      if (n % 3 == 1) row.a_constant = a_constant(alpha, 1, p);
      if (n % 3 == 2) row.a_constant = a_constant(alpha, 2, p);
      if (M <= 20000) {
        row.brute_sup = expsats_sup_brute(alpha, n, p, s.config().jobs);
        res.reports.push_back(make_report("expsats", M, "alpha " + std::to_string(alpha) + ", n " + std::to_string(n),
                                          std::abs(row.sup - row.brute_sup), std::nullopt, 0.0, tol));
      }
      rows.push_back(row);
    }
  }
  // A constants: bounds and at most three values over all units.
  for (int n : {1, 2}) {
    const Int M = ipow(p, n);
    std::vector<double> vals;
    for (Int alpha = 1; alpha < M; ++alpha)
      if (alpha % p != 0) vals.push_back(a_constant(alpha, n, p));
    std::sort(vals.begin(), vals.end());
    int distinct = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) distinct += i == 0 || vals[i] - vals[i - 1] > 1e-9;
    const std::string sub = "A_{alpha," + std::to_string(n) + "}";
    res.reports.push_back(make_report("a_constant", M, sub + " minimum", vals.front(),
                                      n == 1 ? 1.0 : std::sqrt(2.0) + 1e-12, std::nullopt, n == 1 ? tol : 0.0));
    res.reports.push_back(make_report("a_constant", M, sub + " maximum", vals.back(), std::nullopt, 2.0, tol));
    res.reports.push_back(make_report("a_constant", M, sub + " distinct values", distinct, std::nullopt, 3.0, 0.0));
  }
  // Reduction vs direct, exhaustive within the reducible patterns.
  // n = 3 over every cubic costs p^{4n}; only p = 5 goes past n = 2.
  const int audit_max = p == 5 ? std::min(nmax, 4) : std::min(nmax, 2);
  for (int n = 1; n <= audit_max; ++n) {
    const auto a = audit_reductions(p, n, tol, s.config().jobs);
    auto r = make_report("reduction", ipow(p, n), "n " + std::to_string(n) + ": mismatching moduli",
                         static_cast<double>(a.mismatches), std::nullopt, 0.0, 0.0);
    r.note = std::to_string(a.checked) + " sums, " + std::to_string(a.in_scope) + " in reduction scope, worst " + fmt(a.worst);
    res.reports.push_back(r);
  }
  std::ofstream os(s.path("expsum.csv"));
  write_expsum_csv(os, rows);
  res.files.push_back("expsum.csv");
  for (auto& r : res.reports) {
    r.p = p;
    r.k = static_cast<int>(std::lround(std::log(static_cast<double>(r.N)) / std::log(static_cast<double>(p))));
  }
  tag(res.reports, s, t0);
  return res;
}

// ---------------------------------------------------------------------------
// Driver

int run(const RunConfig& c, std::ostream& log) {
  validate(c);
  fs::create_directories(c.out);
  Session s(c);
  std::vector<std::string> suites;
  if (c.suite == "all") {
    suites = {"quantize", "eigen", "figure", "verify", "expsum"};
    if (!is_prime_power(c)) suites = {"quantize", "eigen", "verify"};
  } else {
    suites = {c.suite};
  }
  std::vector<VerificationReport> reports;
  for (const auto& name : suites) {
    const auto t0 = Clock::now();
    SuiteResult r;
    if (name == "quantize") r = cmd_quantize(s);
    else if (name == "eigen") r = cmd_eigenbasis(s);
    else if (name == "figure") r = cmd_figure(s);
    else if (name == "verify") r = cmd_verify(s);
    else r = cmd_expsum(s);
    log << name << ": " << r.reports.size() << " reports";
    for (const auto& f : r.files) log << ", " << f;
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%.2f s)\n", seconds_since(t0));
    log << buf;
    append(reports, std::move(r.reports));
  }
  {
    std::ofstream js(s.path("reports.jsonl"));
    write_reports_jsonl(js, reports);
    std::ofstream cs(s.path("summary.csv"));
    write_summary_csv(cs, reports);
  }
  std::ostringstream summary;
  write_summary_csv(summary, reports);
  log << summary.str();
  const bool ok = all_pass(reports);
  if (!ok) {
    std::vector<VerificationReport> failed;
    for (const auto& r : reports)
      if (!r.pass) failed.push_back(r);
    sort_reports(failed);
    log << "FAILED " << failed.size() << " of " << reports.size() << " reports\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(failed.size(), 20); ++i)
      log << "  " << failed[i].theorem << " N=" << failed[i].N << " " << failed[i].subject << ": measured "
          << fmt(failed[i].measured) << ", violation " << fmt(failed[i].violation()) << '\n';
  }
  return ok ? 0 : 1;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Quantized cat maps: Hecke eigenbases, sup norms, entropies and exponential sums"};
  RunConfig c;
  std::string matrix = "1,2,2,5";
  double tol = -1.0;
  app.add_option("--p", c.p, "odd prime")->capture_default_str();
  app.add_option("--k", c.k, "exponent, N = p^k")->capture_default_str();
  app.add_option("--n", c.n, "composite odd modulus (overrides --p/--k)");
  app.add_option("--matrix", matrix, "a,b,c,d")->capture_default_str();
  app.add_option("--suite", c.suite, "quantize|eigen|figure|verify|expsum|all")
      ->check(CLI::IsMember(kSuites))
      ->capture_default_str();
  app.add_option("--out", c.out, "output directory (CATMAP_OUT overrides)")->capture_default_str();
  app.add_option("--tol", tol, "tolerance override for every check");
  app.add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed for sampled checks")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<Int> entries;
    std::stringstream ss(matrix);
    std::string item;
    while (std::getline(ss, item, ',')) entries.push_back(std::stoll(item));
    if (entries.size() != 4) throw ConfigError("--matrix needs four comma-separated integers a,b,c,d");
    std::copy(entries.begin(), entries.end(), c.matrix.begin());
  } catch (const std::logic_error&) {
    std::cerr << "catmap: error: --matrix needs four comma-separated integers a,b,c,d\n";
    return 2;
  }
  if (tol >= 0.0) c.tol = tol;
  else if (app.count("--tol")) {
    std::cerr << "catmap: error: --tol must be non-negative\n";
    return 2;
  }
  if (const char* env = std::getenv("CATMAP_OUT"); env && *env) c.out = env;

  try {
    return run(c, std::cout);
  } catch (const std::invalid_argument& e) {  // ConfigError, UnsupportedModulusError
    std::cerr << "catmap: error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {  // UpperTriangularError and routing errors
    std::cerr << "catmap: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace catmap::cli
