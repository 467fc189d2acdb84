#include "momopt/polyring.hpp"

#include <algorithm>
#include <numeric>

#include "momopt/error.hpp"

namespace momopt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OrderTooSmall: return "OrderTooSmall";
    case ErrorCode::EmptyGeneratorDegree: return "EmptyGeneratorDegree";
    case ErrorCode::TooManyGenerators: return "TooManyGenerators";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
    degree_ += e;
  }
}

Monomial Monomial::unit(std::size_t nvars, std::size_t var, int power) {
  std::vector<int> e(nvars, 0);
  e.at(var) = power;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  r.degree_ += other.degree_;
  return r;
}

bool Monomial::divisible_by(const Monomial& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (other.exps_[i] > exps_[i]) return false;
  return true;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Within a degree, x-heavy monomials come first.
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (int e : m.exponents()) h = (h ^ static_cast<std::size_t>(e)) * 0x100000001b3ull;
  return h;
}

namespace {

void fill_degree(std::size_t pos, int remaining, std::vector<int>& cur,
                 std::vector<Monomial>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    fill_degree(pos + 1, remaining - e, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<Monomial> monomials_of_degree(std::size_t n, int d) {
  std::vector<Monomial> out;
  if (n == 0 || d < 0) return out;
  std::vector<int> cur(n, 0);
  fill_degree(0, d, cur, out);
  return out;
}

std::vector<Monomial> monomials_up_to(std::size_t n, int d) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "monomials_up_to needs n >= 1");
  std::vector<Monomial> out;
  out.reserve(monomial_count(n, d));
  for (int k = 0; k <= d; ++k) {
    auto layer = monomials_of_degree(n, k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::size_t monomial_count(std::size_t n, int d) {
  if (d < 0) return 0;
  // C(n+d, n) computed incrementally, exact for the sizes used here.
  std::size_t c = 1;
  for (std::size_t i = 1; i <= n; ++i) c = c * (static_cast<std::size_t>(d) + i) / i;
  return c;
}

Polynomial::Polynomial(std::size_t nvars, TermMap terms) : n_(nvars) {
  for (auto& [m, c] : terms) {
    if (m.nvars() != nvars) throw Error(ErrorCode::LengthMismatch, "monomial arity");
    if (c != 0.0) terms_.emplace(m, c);
  }
}

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t var) {
  Polynomial p(nvars);
  p.add_term(Monomial::unit(nvars, var), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const noexcept {
  if (terms_.empty()) return -1;
  return terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

bool Polynomial::is_nonzero_constant() const noexcept {
  return terms_.size() == 1 && terms_.begin()->first.degree() == 0;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw Error(ErrorCode::LengthMismatch, "evaluation point arity");
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (std::size_t i = 0; i < n_; ++i)
      for (int k = 0; k < m[i]; ++k) v *= x[i];
    acc += v;
  }
  return acc;
}

Polynomial Polynomial::operator-() const { return poly_scale(*this, -1.0); }

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  Polynomial r = p;
  r += q;
  return r;
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) {
  Polynomial r = p;
  r -= q;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  if (q.n_ != n_) throw Error(ErrorCode::LengthMismatch, "variable count mismatch");
  for (const auto& [m, c] : q.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  if (q.n_ != n_) throw Error(ErrorCode::LengthMismatch, "variable count mismatch");
  for (const auto& [m, c] : q.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (q.n_ != p.n_) throw Error(ErrorCode::LengthMismatch, "variable count mismatch");
  Polynomial r(p.n_);
  for (const auto& [a, ca] : p.terms_)
    for (const auto& [b, cb] : q.terms_) r.add_term(a * b, ca * cb);
  return r;
}

Polynomial operator*(double c, const Polynomial& p) { return poly_scale(p, c); }

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(n_, 1.0);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::extended(std::size_t nvars) const {
  if (nvars < n_) throw Error(ErrorCode::InvalidArgument, "cannot drop variables");
  Polynomial r(nvars);
  for (const auto& [m, c] : terms_) {
    std::vector<int> e = m.exponents();
    e.resize(nvars, 0);
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial poly_mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial poly_scale(const Polynomial& p, double c) {
  Polynomial::TermMap t;
  if (c != 0.0)
    for (const auto& [m, v] : p.terms()) t.emplace(m, v * c);
  return Polynomial(p.nvars(), std::move(t));
}

Polynomial differentiate(const Polynomial& p, std::size_t var) {
  if (var >= p.nvars()) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
  Polynomial::TermMap t;
  for (const auto& [m, c] : p.terms()) {
    int e = m[var];
    if (e == 0) continue;
    std::vector<int> ex = m.exponents();
    ex[var] = e - 1;
    t.emplace(Monomial(std::move(ex)), c * e);
  }
  return Polynomial(p.nvars(), std::move(t));
}

double evaluate(const Polynomial& p, std::span<const double> x) { return p.evaluate(x); }

}  // namespace momopt
