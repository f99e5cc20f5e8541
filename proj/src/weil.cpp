#include "catmap/weil.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace catmap {

// ---------------------------------------------------------------------------
// SL(2, Z_N)

TorusMatrix TorusMatrix::make(Int a, Int b, Int c, Int d, Int N) {
  if (N < 1) throw std::invalid_argument("TorusMatrix: modulus must be positive");
  TorusMatrix m{reduce(a, N), reduce(b, N), reduce(c, N), reduce(d, N), N};
  if (m.det() != 1 % N)
    throw std::invalid_argument("TorusMatrix: determinant is " + std::to_string(m.det()) +
                                " mod " + std::to_string(N) + ", expected 1");
  return m;
}

TorusMatrix TorusMatrix::nb(Int b, Int N) { return make(1, b, 0, 1, N); }

TorusMatrix TorusMatrix::at(Int t, Int N) { return make(t, 0, 0, inverse_mod(t, N), N); }

TorusMatrix TorusMatrix::omega(Int N) { return make(0, 1, -1, 0, N); }

Int TorusMatrix::det() const { return sub_mod(mul_mod(a, d, N), mul_mod(b, c, N), N); }

TorusMatrix TorusMatrix::operator*(const TorusMatrix& o) const {
  if (o.N != N) throw std::invalid_argument("TorusMatrix: product of different moduli");
  return {add_mod(mul_mod(a, o.a, N), mul_mod(b, o.c, N), N),
          add_mod(mul_mod(a, o.b, N), mul_mod(b, o.d, N), N),
          add_mod(mul_mod(c, o.a, N), mul_mod(d, o.c, N), N),
          add_mod(mul_mod(c, o.b, N), mul_mod(d, o.d, N), N), N};
}

TorusMatrix TorusMatrix::reduced(Int M) const {
  if (N % M != 0) throw std::invalid_argument("TorusMatrix::reduced: modulus does not divide");
  return {a % M, b % M, c % M, d % M, M};
}

std::pair<Int, Int> TorusMatrix::apply(Int x1, Int x2) const {
  return {add_mod(mul_mod(a, x1, N), mul_mod(b, x2, N), N),
          add_mod(mul_mod(c, x1, N), mul_mod(d, x2, N), N)};
}

Admissibility check_admissible(Int a, Int b, Int c, Int d, Int N) {
  Admissibility out;
  const __int128 det = static_cast<__int128>(a) * d - static_cast<__int128>(b) * c;
  if (det != 1) out.failures.push_back("determinant over Z is not 1");
  const Int tr = a + d;
  if (tr <= 2 && tr >= -2) out.failures.push_back("|tr(A)| = " + std::to_string(tr < 0 ? -tr : tr) + " is not > 2");
  if (reduce(a, 2) != 1 || reduce(d, 2) != 1) out.failures.push_back("diagonal entries not both odd");
  if (reduce(b, 2) != 0 || reduce(c, 2) != 0) out.failures.push_back("off-diagonal entries not both even");
  if (N % 2 == 0 && (reduce(a, 4) != 1 || reduce(b, 4) != 0 || reduce(c, 4) != 0 || reduce(d, 4) != 1))
    out.failures.push_back("N is even and A is not I mod 4");
  out.admissible = out.failures.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Generator words

namespace {

TorusMatrix token_matrix(const GeneratorToken& t, Int N) {
  switch (t.kind) {
    case GeneratorToken::Kind::NB:
      return TorusMatrix::nb(t.value, N);
    case GeneratorToken::Kind::AT:
      return TorusMatrix::at(t.value, N);
    case GeneratorToken::Kind::OMEGA:
      return TorusMatrix::omega(N);
  }
  return TorusMatrix::identity(N);
}

void push_nb(std::vector<GeneratorToken>& w, Int b, Int M) {
  b = reduce(b, M);
  if (b != 0) w.push_back({GeneratorToken::Kind::NB, b});
}

void push_at(std::vector<GeneratorToken>& w, Int t, Int M) {
  t = reduce(t, M);
  if (t != 1 % M) w.push_back({GeneratorToken::Kind::AT, t});
}

// Word for B with c a unit: n_{a/c} omega n_{cd} a_{-c}.
void unit_c_word(std::vector<GeneratorToken>& w, const TorusMatrix& B) {
  const Int M = B.N;
  const Int cinv = inverse_mod(B.c, M);
  push_nb(w, mul_mod(B.a, cinv, M), M);
  w.push_back({GeneratorToken::Kind::OMEGA, 0});
  push_nb(w, mul_mod(B.c, B.d, M), M);
  push_at(w, -B.c, M);
}

}  // namespace

TorusMatrix GeneratorWord::product() const {
  TorusMatrix m = TorusMatrix::identity(modulus);
  for (const auto& t : tokens) m = m * token_matrix(t, modulus);
  return m;
}

std::string GeneratorWord::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) os << ", ";
    switch (tokens[i].kind) {
      case GeneratorToken::Kind::NB:
        os << "NB(" << tokens[i].value << ')';
        break;
      case GeneratorToken::Kind::AT:
        os << "AT(" << tokens[i].value << ')';
        break;
      case GeneratorToken::Kind::OMEGA:
        os << "OMEGA";
        break;
    }
  }
  os << ']';
  return os.str();
}

GeneratorWord decompose_to_word(const TorusMatrix& B0, const PrimePowerModulus& modulus) {
  const Int M = modulus.M;
  const TorusMatrix B = B0.N == M ? B0 : B0.reduced(M);
  GeneratorWord word;
  word.modulus = M;
  auto& w = word.tokens;
  if (B.c % modulus.p != 0) {
    unit_c_word(w, B);
  } else if (B.c == 0) {
    // [[a, b], [0, a^{-1}]] = n_{ab} a_a
    push_nb(w, mul_mod(B.a, B.b, M), M);
    push_at(w, B.a, M);
  } else {
    // a is a unit; omega^{-1} = a_{-1} omega and omega B has lower-left -a.
    push_at(w, -1, M);
    w.push_back({GeneratorToken::Kind::OMEGA, 0});
    unit_c_word(w, TorusMatrix::omega(M) * B);
  }
  return word;
}

// ---------------------------------------------------------------------------
// Prime-power representation

double WeilConstants::lambda(Int t) const {
  const int j = jacobi_symbol(t, p);
  if (j == 0) throw NonUnitError(t, p, p);
  return (lambda_power % 2 == 1 && j < 0) ? -1.0 : 1.0;
}

WeilConstants weil_constants(const PrimePowerModulus& modulus) {
  if (modulus.p == 2) throw UnsupportedModulusError("Weil constants need an odd prime");
  WeilConstants w;
  w.p = modulus.p;
  w.r = inverse_mod(2, modulus.M);
  w.lambda_power = modulus.k;
  if (modulus.k % 2 == 0) {
    w.gauss_norm = 1.0;
  } else {
    const double sign = jacobi_symbol(2, modulus.p);
    w.gauss_norm = modulus.p % 4 == 1 ? Complex(sign, 0.0) : Complex(0.0, sign);
  }
  return w;
}

WeilRepresentation::WeilRepresentation(const PrimePowerModulus& modulus)
    : modulus_(modulus), constants_(weil_constants(modulus)), roots_(modulus.M) {}

void WeilRepresentation::check_size(const StateVector& psi) const {
  if (psi.size() != modulus_.M)
    throw std::invalid_argument("state of length " + std::to_string(psi.size()) +
                                " applied to an operator on Z_" + std::to_string(modulus_.M));
}

StateVector WeilRepresentation::apply_nb(Int b, const StateVector& psi) const {
  check_size(psi);
  const Int M = modulus_.M;
  const Int rb = mul_mod(constants_.r, b, M);
  StateVector out(M);
  for (Int x = 0; x < M; ++x) out(x) = roots_.at_reduced(mul_mod(rb, mul_mod(x, x, M), M)) * psi(x);
  return out;
}

StateVector WeilRepresentation::apply_at(Int t, const StateVector& psi) const {
  check_size(psi);
  const Int M = modulus_.M;
  if (gcd(t, M) != 1) throw NonUnitError(reduce(t, M), M, gcd(t, M));
  const double lam = constants_.lambda(t);
  const Int tr = reduce(t, M);
  StateVector out(M);
  for (Int x = 0; x < M; ++x) out(x) = lam * psi(mul_mod(tr, x, M));
  return out;
}

StateVector WeilRepresentation::apply_omega(const StateVector& psi) const {
  check_size(psi);
  const Int M = modulus_.M;
  const Complex scale = constants_.gauss_norm / std::sqrt(static_cast<double>(M));
  StateVector out(M);
  for (Int x = 0; x < M; ++x) {
    Complex acc = 0.0;
    Int idx = 0;  // x y mod M, advanced incrementally
    for (Int y = 0; y < M; ++y) {
      acc += psi(y) * roots_.at_reduced(idx);
      idx += x;
      if (idx >= M) idx -= M;
    }
    out(x) = scale * acc;
  }
  return out;
}

StateVector WeilRepresentation::apply(const GeneratorToken& token, const StateVector& psi) const {
  switch (token.kind) {
    case GeneratorToken::Kind::NB:
      return apply_nb(token.value, psi);
    case GeneratorToken::Kind::AT:
      return apply_at(token.value, psi);
    case GeneratorToken::Kind::OMEGA:
      return apply_omega(psi);
  }
  return psi;
}

StateVector WeilRepresentation::apply(const GeneratorWord& word, const StateVector& psi) const {
  if (word.modulus != modulus_.M) throw std::invalid_argument("word modulus mismatch");
  check_size(psi);
  StateVector out = psi;
  for (auto it = word.tokens.rbegin(); it != word.tokens.rend(); ++it) out = apply(*it, out);
  return out;
}

OperatorMatrix WeilRepresentation::dense(const TorusMatrix& B0, Int limit) const {
  const Int M = modulus_.M;
  if (M > limit)
    throw std::length_error("refusing to materialize a " + std::to_string(M) + "x" +
                            std::to_string(M) + " operator (limit " + std::to_string(limit) +
                            "); apply it in action form instead");
  const TorusMatrix B = B0.N == M ? B0 : B0.reduced(M);
  const Int r = constants_.r;
  OperatorMatrix U(M, M);

  if (B.c % modulus_.p != 0) {
    // B = n_{b1} omega n_{b2} a_t, t = -c:
    //   U[x, t y] = S/sqrt(M) Lambda(t) e((r b1 x^2 + r b2 y^2 + x y)/M)
    const Int t = reduce(-B.c, M);
    const Int rb1 = mul_mod(r, mul_mod(B.a, inverse_mod(B.c, M), M), M);
    const Int rb2 = mul_mod(r, mul_mod(B.c, B.d, M), M);
    const Complex scale =
        constants_.gauss_norm * constants_.lambda(t) / std::sqrt(static_cast<double>(M));
    std::vector<Int> qy(M);
    for (Int y = 0; y < M; ++y) qy[y] = mul_mod(rb2, mul_mod(y, y, M), M);
    for (Int x = 0; x < M; ++x) {
      const Int qx = mul_mod(rb1, mul_mod(x, x, M), M);
      Int xy = 0;
      for (Int y = 0; y < M; ++y) {
        Int e = qx + qy[y] + xy;
        e %= M;
        U(x, mul_mod(t, y, M)) = scale * roots_.at_reduced(e);
        xy += x;
        if (xy >= M) xy -= M;
      }
    }
    return U;
  }

  // d is a unit: B = n_{b/d} n^T_{cd} a_{1/d}; the lower-triangular factor has
  // kernel g(z - x)/M with g(w) = sum_y e((-r c d y^2 + w y)/M).
  const Int dinv = inverse_mod(B.d, M);
  const Int ru = mul_mod(r, mul_mod(B.b, dinv, M), M);
  const Int quad = reduce(-mul_mod(r, mul_mod(B.c, B.d, M), M), M);
  std::vector<Complex> g(M);
  std::vector<Int> qy(M);
  for (Int y = 0; y < M; ++y) qy[y] = mul_mod(quad, mul_mod(y, y, M), M);
  for (Int w = 0; w < M; ++w) {
    Complex acc = 0.0;
    Int wy = 0;
    for (Int y = 0; y < M; ++y) {
      acc += roots_.at_reduced((qy[y] + wy) % M);
      wy += w;
      if (wy >= M) wy -= M;
    }
    g[w] = acc;
  }
  const double lam = constants_.lambda(B.d) / static_cast<double>(M);
  for (Int x = 0; x < M; ++x) {
    const Complex phase = lam * roots_.at_reduced(mul_mod(ru, mul_mod(x, x, M), M));
    for (Int j = 0; j < M; ++j) U(x, j) = phase * g[sub_mod(mul_mod(B.d, j, M), x, M)];
  }
  return U;
}

QuantizedOperator::QuantizedOperator(std::shared_ptr<const WeilRepresentation> rep,
                                     const TorusMatrix& B)
    : rep_(std::move(rep)),
      matrix_(B.N == rep_->dimension() ? B : B.reduced(rep_->dimension())),
      word_(decompose_to_word(matrix_, rep_->modulus())) {}

QuantizedOperator quantize(const TorusMatrix& B, const PrimePowerModulus& modulus) {
  if (modulus.p == 2)
    throw UnsupportedModulusError("no Weil representation of SL(2, Z_2^k) is provided");
  return QuantizedOperator(std::make_shared<const WeilRepresentation>(modulus), B);
}

QuantizedOperator quantize(const TorusMatrix& B, std::shared_ptr<const WeilRepresentation> rep) {
  return QuantizedOperator(std::move(rep), B);
}

// ---------------------------------------------------------------------------
// Composite N

TensorOperator::TensorOperator(const TorusMatrix& A) : N_(A.N) {
  if (N_ % 2 == 0)
    throw UnsupportedModulusError("tensor quantization needs odd N, got " + std::to_string(N_));
  if (N_ < 3) throw std::invalid_argument("tensor quantization needs N >= 3");
  for (const auto& f : crt_split(N_)) factors_.push_back(quantize(A.reduced(f.M), f));
  strides_.assign(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * factors_[i].dimension();
}

StateVector TensorOperator::apply(const StateVector& psi) const {
  if (psi.size() != N_) throw std::invalid_argument("state length does not match N");
  // Re-index Z_N into the mixed-radix tensor layout.
  std::vector<Int> pos(N_);
  for (Int x = 0; x < N_; ++x) {
    Int q = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) q += (x % factors_[i].dimension()) * strides_[i];
    pos[x] = q;
  }
  StateVector T(N_);
  for (Int x = 0; x < N_; ++x) T(pos[x]) = psi(x);

  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const Int m = factors_[i].dimension();
    const Int inner = strides_[i];
    const Int outer = N_ / (m * inner);
    StateVector fiber(m);
    for (Int o = 0; o < outer; ++o) {
      for (Int in = 0; in < inner; ++in) {
        const Int base = o * m * inner + in;
        for (Int j = 0; j < m; ++j) fiber(j) = T(base + j * inner);
        const StateVector img = factors_[i].apply(fiber);
        for (Int j = 0; j < m; ++j) T(base + j * inner) = img(j);
      }
    }
  }

  StateVector out(N_);
  for (Int x = 0; x < N_; ++x) out(x) = T(pos[x]);
  return out;
}

OperatorMatrix TensorOperator::dense(Int limit) const {
  if (N_ > limit)
    throw std::length_error("refusing to materialize a " + std::to_string(N_) + "x" +
                            std::to_string(N_) + " operator (limit " + std::to_string(limit) +
                            "); apply it in action form instead");
  OperatorMatrix U(N_, N_);
  for (Int j = 0; j < N_; ++j) U.col(j) = apply(delta_state(N_, j));
  return U;
}

TensorOperator tensor_quantize(const TorusMatrix& A) { return TensorOperator(A); }

// ---------------------------------------------------------------------------
// Schwartz spaces and intertwiners

bool schwartz_membership(const StateVector& psi, const PrimePowerModulus& modulus, int m, int n,
                         double tol) {
  const int k = modulus.k;
  if (!(k >= m && m >= n && n >= 0))
    throw std::invalid_argument("schwartz_membership needs k >= m >= n >= 0");
  if (psi.size() != modulus.M) throw std::invalid_argument("state length does not match p^k");
  const Int pm = ipow(modulus.p, m);
  const Int pn = ipow(modulus.p, n);
  for (Int x = 0; x < modulus.M; ++x) {
    if (x % pn != 0 && std::abs(psi(x)) > tol) return false;
    if (std::abs(psi(x) - psi(x % pm)) > tol) return false;
  }
  return true;
}

StateVector storfunktion(const PrimePowerModulus& modulus) {
  if (modulus.k % 2 != 0)
    throw std::invalid_argument("storfunktion is defined for even exponents only");
  const Int step = ipow(modulus.p, modulus.k / 2);
  StateVector f = StateVector::Zero(modulus.M);
  for (Int x = 0; x < modulus.M; x += step) f(x) = 1.0;
  return f;
}

StateVector t_m_forward(const StateVector& psi, const PrimePowerModulus& modulus, int m) {
  const int k = modulus.k;
  if (m < 0 || k - 2 * m < 0) throw std::invalid_argument("T_m needs 0 <= 2m <= k");
  if (!schwartz_membership(psi, modulus, k - m, m))
    throw std::invalid_argument("T_m: state is not in S_k(k-m, m)");
  const Int pm = ipow(modulus.p, m);
  const Int target = ipow(modulus.p, k - 2 * m);
  const double scale = std::pow(static_cast<double>(modulus.p), -0.5 * m);
  StateVector out(target);
  for (Int x = 0; x < target; ++x) out(x) = scale * psi(pm * x);
  return out;
}

StateVector t_m_inverse(const StateVector& phi, const PrimePowerModulus& modulus, int m) {
  const int k = modulus.k;
  if (m < 0 || k - 2 * m < 0) throw std::invalid_argument("T_m needs 0 <= 2m <= k");
  const Int target = ipow(modulus.p, k - 2 * m);
  if (phi.size() != target) throw std::invalid_argument("T_m inverse: state length is not p^{k-2m}");
  const Int pm = ipow(modulus.p, m);
  const double scale = std::pow(static_cast<double>(modulus.p), 0.5 * m);
  StateVector out = StateVector::Zero(modulus.M);
  for (Int y = 0; y < modulus.M; y += pm) out(y) = scale * phi((y / pm) % target);
  return out;
}

// ---------------------------------------------------------------------------
// p = 2

TwoAdicGenerators::TwoAdicGenerators(int k) : k_(k), M_(ipow(2, k)), roots_(ipow(2, k)) {
  if (k < 1) throw std::invalid_argument("TwoAdicGenerators needs k >= 1");
}

StateVector TwoAdicGenerators::apply_nb(Int b, const StateVector& psi) const {
  if (reduce(b, 2) != 0) throw std::invalid_argument("n_b at p = 2 needs even b");
  const Int half = reduce(b / 2, M_);
  StateVector out(M_);
  for (Int x = 0; x < M_; ++x) out(x) = roots_.at_reduced(mul_mod(half, mul_mod(x, x, M_), M_)) * psi(x);
  return out;
}

StateVector TwoAdicGenerators::apply_at(Int t, const StateVector& psi) const {
  if (reduce(t, 2) != 1) throw NonUnitError(reduce(t, M_), M_, 2);
  StateVector out(M_);
  for (Int x = 0; x < M_; ++x) out(x) = psi(mul_mod(reduce(t, M_), x, M_));
  return out;
}

StateVector TwoAdicGenerators::apply_h(const StateVector& psi) const {
  StateVector out(M_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M_));
  for (Int x = 0; x < M_; ++x) {
    Complex acc = 0.0;
    for (Int y = 0; y < M_; ++y) acc += psi(y) * roots_.at_reduced(mul_mod(x, y, M_));
    out(x) = scale * acc;
  }
  return out;
}

StateVector TwoAdicGenerators::apply_h_inverse(const StateVector& psi) const {
  StateVector out(M_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M_));
  for (Int x = 0; x < M_; ++x) {
    Complex acc = 0.0;
    for (Int y = 0; y < M_; ++y) acc += psi(y) * roots_(-mul_mod(x, y, M_));
    out(x) = scale * acc;
  }
  return out;
}

StateVector TwoAdicGenerators::apply_nc_transpose(Int c, const StateVector& psi) const {
  return apply_h_inverse(apply_nb(-c, apply_h(psi)));
}

QuantizedOperator TwoAdicGenerators::quantize(const TorusMatrix&) const {
  throw UnsupportedModulusError("composed operators U_{2^k}(B) are not supported; only the "
                                "generator operators are available at p = 2");
}

}  // namespace catmap
