#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace momopt {

/// Exponent vector X^alpha.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<int> exps);
  Monomial(std::initializer_list<int> exps) : Monomial(std::vector<int>(exps)) {}

  static Monomial unit(std::size_t nvars, std::size_t var, int power = 1);

  std::size_t nvars() const noexcept { return exps_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const noexcept { return exps_; }

  Monomial operator*(const Monomial& other) const;
  /// True when every exponent of `other` is <= the matching exponent here.
  bool divisible_by(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Graded lexicographic order: lower degree first, then the monomial with the
/// larger leading exponent first (1 < x < y < x^2 < xy < y^2 for n = 2).
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

/// All monomials of degree <= d in n variables, graded-lex ordered.
std::vector<Monomial> monomials_up_to(std::size_t n, int d);
/// Monomials of degree exactly d, in the same order they appear above.
std::vector<Monomial> monomials_of_degree(std::size_t n, int d);

/// Number of monomials of degree <= d in n variables, C(n+d, n).
std::size_t monomial_count(std::size_t n, int d);

/// Sparse real polynomial in n variables. Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : n_(nvars) {}
  Polynomial(std::size_t nvars, TermMap terms);

  static Polynomial constant(std::size_t nvars, double c);
  static Polynomial variable(std::size_t nvars, std::size_t var);
  static Polynomial monomial(const Monomial& m, double c = 1.0);

  std::size_t nvars() const noexcept { return n_; }
  /// Maximal total degree, -1 for the zero polynomial.
  int degree() const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  const TermMap& terms() const noexcept { return terms_; }
  double coefficient(const Monomial& m) const;
  /// Nonzero constant polynomial.
  bool is_nonzero_constant() const noexcept;

  double evaluate(std::span<const double> x) const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double c, const Polynomial& p);
  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);

  Polynomial pow(unsigned e) const;

  /// Same polynomial seen in a ring with more variables appended at the end.
  Polynomial extended(std::size_t nvars) const;

  friend bool operator==(const Polynomial& p, const Polynomial& q) {
    return p.n_ == q.n_ && p.terms_ == q.terms_;
  }

 private:
  void add_term(const Monomial& m, double c);

  std::size_t n_ = 0;
  TermMap terms_;
};

Polynomial poly_add(const Polynomial& p, const Polynomial& q);
Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
Polynomial poly_scale(const Polynomial& p, double c);
Polynomial differentiate(const Polynomial& p, std::size_t var);
double evaluate(const Polynomial& p, std::span<const double> x);

}  // namespace momopt
