#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "momopt/polyring.hpp"

using namespace momopt;

namespace {

Polynomial P(const std::string& vars, const std::string& text) {
  return parse_polynomial(text, VariableTable::from_list(vars));
}

// Term-wise power rule, written out independently of differentiate().
Polynomial power_rule(const Polynomial& p, std::size_t var) {
  Polynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    if (m[var] == 0) continue;
    std::vector<int> e = m.exponents();
    double k = e[var]--;
    out += Polynomial::monomial(Monomial(e), k * c);
  }
  return out;
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_SUITE("polyring") {
  TEST_CASE("monomials_up_to enumerates in graded-lex order") {
    auto m1 = monomials_up_to(1, 2);
    REQUIRE(m1.size() == 3);
    CHECK(m1[0] == Monomial{0});
    CHECK(m1[1] == Monomial{1});
    CHECK(m1[2] == Monomial{2});

    auto m2 = monomials_up_to(2, 2);
    std::vector<Monomial> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    CHECK(m2 == expected);
  }

  TEST_CASE("three variables up to degree five gives 56 monomials") {
    // Exhaustive enumeration of exponent triples as the oracle.
    std::size_t brute = 0;
    for (int a = 0; a <= 5; ++a)
      for (int b = 0; a + b <= 5; ++b)
        for (int c = 0; a + b + c <= 5; ++c) ++brute;
    CHECK(brute == 56);
    CHECK(monomials_up_to(3, 5).size() == brute);
    CHECK(monomial_count(3, 5) == brute);
  }

  TEST_CASE("enumeration is sorted, duplicate free and starts at 1") {
    for (std::size_t n = 1; n <= 4; ++n)
      for (int d = 0; d <= 5; ++d) {
        auto ms = monomials_up_to(n, d);
        CHECK(ms.front() == Monomial(n));
        CHECK(std::is_sorted(ms.begin(), ms.end(), GradedLexLess{}));
        std::set<std::vector<int>> seen;
        for (const auto& m : ms) seen.insert(m.exponents());
        CHECK(seen.size() == ms.size());
        CHECK(ms.size() == monomial_count(n, d));
      }
  }

  TEST_CASE("graded lex is a strict total order") {
    auto ms = monomials_up_to(3, 3);
    GradedLexLess less;
    for (const auto& a : ms) {
      CHECK_FALSE(less(a, a));
      for (const auto& b : ms) {
        if (a == b) continue;
        CHECK(less(a, b) != less(b, a));
        if (a.degree() < b.degree()) CHECK(less(a, b));
      }
    }
  }

  TEST_CASE("differentiate") {
    CHECK(differentiate(P("x,y", "x^4*y^2"), 0) == P("x,y", "4*x^3*y^2"));
    Polynomial motzkin = P("x,y", fixtures::kMotzkin);
    CHECK(differentiate(motzkin, 0) == power_rule(motzkin, 0));
    CHECK(differentiate(motzkin, 0) == P("x,y", "4*x^3*y^2 + 2*x*y^4 - 6*x*y^2"));
    CHECK(differentiate(Polynomial::constant(1, 1.0), 0).is_zero());
  }

  TEST_CASE("evaluate") {
    Polynomial motzkin = P("x,y", fixtures::kMotzkin);
    CHECK(motzkin.evaluate(std::vector<double>{1.0, 1.0}) == 0.0);
    CHECK(motzkin.evaluate(std::vector<double>{0.0, 0.0}) == 1.0);
    CHECK(P("x,y", "x^2 + y^2 - 1").evaluate(std::vector<double>{0.6, 0.8}) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("ring operations") {
    CHECK(P("x,y", "x+y") * P("x,y", "x-y") == P("x,y", "x^2 - y^2"));
    Polynomial p = P("x,y", "3*x^2*y - 7*y + 2");
    CHECK(poly_add(p, poly_scale(p, -1.0)).is_zero());
    CHECK(poly_add(p, poly_scale(p, -1.0)).degree() == -1);
    CHECK(P("x", "x+1").pow(2) == P("x", "x^2 + 2*x + 1"));
    CHECK(poly_mul(P("x", "x+1"), P("x", "x+1")) == P("x", "x^2 + 2*x + 1"));
  }

  TEST_CASE("no stored coefficient is zero") {
    Polynomial p = P("x,y", "x^2 + x*y") - P("x,y", "x^2");
    for (const auto& [m, c] : p.terms()) CHECK(c != 0.0);
    CHECK(p.num_terms() == 1);
    CHECK(p.degree() == 2);
  }

  TEST_CASE("random ring axioms and evaluation homomorphism") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t n = 1 + trial % 3;
      Polynomial p = fixtures::random_polynomial(rng, n, 4, 6);
      Polynomial q = fixtures::random_polynomial(rng, n, 4, 6);
      Polynomial r = fixtures::random_polynomial(rng, n, 4, 6);
      CHECK(p + q == q + p);
      CHECK(p * q == q * p);
      CHECK((p + q) + r == p + (q + r));
      CHECK((p * q) * r == p * (q * r));
      CHECK(p * (q + r) == p * q + p * r);
      if (!p.is_zero() && !q.is_zero()) CHECK((p * q).degree() == p.degree() + q.degree());
      for (int k = 0; k < 5; ++k) {
        auto x = random_point(rng, n);
        double pq = p.evaluate(x) * q.evaluate(x);
        CHECK(std::abs((p * q).evaluate(x) - pq) <= 1e-12 * (1.0 + std::abs(pq)));
      }
      for (std::size_t i = 0; i < n; ++i)
        CHECK(differentiate(p * q, i) == differentiate(p, i) * q + p * differentiate(q, i));
      auto x = random_point(rng, n);
      CHECK(evaluate(p, x) == p.evaluate(x));
    }
  }

  TEST_CASE("extended ring keeps values") {
    Polynomial p = P("x,y", "x^2*y - 3");
    Polynomial e = p.extended(4);
    CHECK(e.nvars() == 4);
    CHECK(e.evaluate(std::vector<double>{2.0, 3.0, 5.0, 7.0}) == p.evaluate(std::vector<double>{2.0, 3.0}));
  }
}
