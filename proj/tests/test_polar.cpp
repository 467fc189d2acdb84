#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "momopt/error.hpp"
#include "momopt/polar.hpp"

using namespace momopt;
using fixtures::make_pop;

namespace {

using Point = std::vector<double>;

bool contains(const std::vector<Polynomial>& ps, const Polynomial& q) {
  return std::find(ps.begin(), ps.end(), q) != ps.end();
}

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

TEST_SUITE("polar") {
  TEST_CASE("KKT system of f = x without constraints") {
    PolarSystem s = kkt_system(make_pop("x", "x"));
    REQUIRE(s.generators.size() == 1);
    CHECK(s.generators[0] == Polynomial::constant(1, 1.0));
    CHECK(s.vars.size() == 1);
  }

  TEST_CASE("KKT system of x^2") {
    PolarSystem s = kkt_system(make_pop("x", "x^2"));
    REQUIRE(s.generators.size() == 1);
    CHECK(s.generators[0] == parse_polynomial("2*x", VariableTable::from_list("x")));
  }

  TEST_CASE("KKT system of x on x^3 >= 0") {
    PolarSystem s = kkt_system(make_pop("x", "x", {"x^3"}));
    REQUIRE(s.vars.size() == 2);
    CHECK(s.vars.names()[1] == "lambda_1");
    VariableTable v = VariableTable::from_list("x,L");
    REQUIRE(s.generators.size() == 2);
    CHECK(s.generators[0] == parse_polynomial("1 - 3*L^2*x^2", v));
    CHECK(s.generators[1] == parse_polynomial("L*x^3", v));
    REQUIRE(s.inequalities.size() == 1);
    CHECK(s.inequalities[0] == parse_polynomial("x^3", v));
    // (x, L) = (0, L) never satisfies stationarity, so there is no KKT point at
    // the minimizer x = 0.
    for (double L : {-10.0, 0.0, 10.0}) CHECK(s.generators[0].evaluate(Point{0.0, L}) == 1.0);
  }

  TEST_CASE("KKT system with equalities") {
    POPInstance pop = make_pop("x,y", "x + y", {}, {"x^2 + y^2 - 1"});
    PolarSystem s = kkt_system(pop);
    REQUIRE(s.vars.size() == 3);
    CHECK(s.vars.names()[2] == "gamma_1");
    VariableTable v = VariableTable::from_list("x,y,G");
    REQUIRE(s.generators.size() == 3);
    CHECK(s.generators[0] == parse_polynomial("1 - 2*G*x", v));
    CHECK(s.generators[1] == parse_polynomial("1 - 2*G*y", v));
    CHECK(s.generators[2] == parse_polynomial("x^2 + y^2 - 1", v));
  }

  TEST_CASE("singular cusp factors") {
    POPInstance pop = fixtures::singular_cusp();
    VariableTable v = pop.vars;
    auto P = [&](const char* t) { return parse_polynomial(t, v); };
    PolarSystem br = polar_generators(pop, PolarMode::PolarBranch);
    // F_empty contains df/dx = 1 and is dropped.
    REQUIRE(br.branches.size() == 3);
    const auto& b1 = br.branches[0];
    CHECK(b1.active == std::vector<std::size_t>{0});
    CHECK(contains(b1.equalities, P("x^3 - y^2")));
    CHECK(contains(b1.equalities, P("-2*y")));
    CHECK(b1.inequalities == std::vector<Polynomial>{P("1 - x^2 - y^2")});
    const auto& b2 = br.branches[1];
    CHECK(b2.active == std::vector<std::size_t>{1});
    CHECK(contains(b2.equalities, P("1 - x^2 - y^2")));
    CHECK(contains(b2.equalities, P("-2*y")));
    const auto& b12 = br.branches[2];
    CHECK(b12.active == (std::vector<std::size_t>{0, 1}));
    CHECK(b12.equalities.size() == 2);
    CHECK(b12.inequalities.empty());

    PolarSystem prod = polar_generators(pop, PolarMode::PolarProduct);
    CHECK(prod.generators.size() == 2 * 2 * 2);
    for (const auto& g : prod.generators) CHECK(g.evaluate(Point{0.0, 0.0}) == 0.0);
  }

  TEST_CASE("gradient ideal without constraints") {
    POPInstance pop = make_pop("x,y", "x^2 + y^2");
    PolarSystem s = polar_generators(pop, PolarMode::PolarProduct);
    REQUIRE(s.generators.size() == 2);
    CHECK(s.generators[0] == parse_polynomial("2*x", pop.vars));
    CHECK(s.generators[1] == parse_polynomial("2*y", pop.vars));
  }

  TEST_CASE("one variable: active constraints need no minor") {
    POPInstance pop = make_pop("x", "x^3 - x", {"1 - x^2"});
    PolarSystem s = polar_generators(pop, PolarMode::PolarProduct);
    // F_empty = (f'), F_{1} = (g1): the product is f' * g1.
    REQUIRE(s.generators.size() == 1);
    CHECK(s.generators[0] == parse_polynomial("(3*x^2 - 1)*(1 - x^2)", pop.vars));
  }

  TEST_CASE("minor count") {
    for (std::size_t m = 1; m <= 4; ++m)
      for (std::size_t n = 1; n <= 4; ++n)
        for (std::size_t l = 1; l <= std::min(m, n); ++l) {
          std::vector<std::vector<Polynomial>> mat(m, std::vector<Polynomial>(n, Polynomial::constant(n, 1.0)));
          CHECK(minors(mat, l).size() == choose(m, l) * choose(n, l));
          CHECK(minor_count(m, n, l) == choose(m, l) * choose(n, l));
        }
  }

  TEST_CASE("minors of a numeric matrix are its determinants") {
    auto c = [](double v) { return Polynomial::constant(1, v); };
    std::vector<std::vector<Polynomial>> m{{c(2), c(1), c(0)}, {c(1), c(3), c(1)}, {c(0), c(1), c(4)}};
    auto full = minors(m, 3);
    REQUIRE(full.size() == 1);
    CHECK(full[0].evaluate(Point{0.0}) == doctest::Approx(2 * 11 - 1 * 4));
    auto two = minors(m, 2);
    REQUIRE(two.size() == 9);
    CHECK(two[0].evaluate(Point{0.0}) == doctest::Approx(5.0));  // rows {0,1}, cols {0,1}
  }

  TEST_CASE("known minimizers lie on the polar variety") {
    for (const auto& c : fixtures::fixtures_with_minimizers()) {
      PolarSystem s = polar_generators(c.pop, PolarMode::PolarProduct);
      REQUIRE(!s.generators.empty());
      for (const auto& x : c.minimizers) CHECK(fixtures::max_abs_value(s.generators, x) <= 1e-9);
    }
  }

  TEST_CASE("product and branch systems cut out the same grid points") {
    std::mt19937_64 rng(7);
    int zeros = 0;
    for (int trial = 0; trial < 20; ++trial) {
      CAPTURE(trial);
      fixtures::GridComparison g = fixtures::compare_product_and_branches(fixtures::random_polar_instance(rng));
      CHECK(g.mismatches == 0);
      zeros += g.zeros;
    }
    CHECK(zeros > 0);
  }

  TEST_CASE("caps") {
    POPInstance pop = make_pop("x,y", "x", {"x", "y", "1 - x", "1 - y"});
    try {
      polar_generators(pop, PolarMode::PolarProduct);
      FAIL("expected CapExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CapExceeded);
    }
    CHECK_NOTHROW(polar_generators(pop, PolarMode::PolarBranch));
    PolarCaps tight;
    tight.max_gens = 3;
    CHECK_THROWS_AS(polar_generators(fixtures::singular_cusp(), PolarMode::PolarProduct, tight), Error);
    CHECK_THROWS_AS(augmented_problem(pop, polar_generators(pop, PolarMode::PolarBranch)), Error);
  }

  TEST_CASE("augmented problems") {
    POPInstance cusp = fixtures::singular_cusp();
    PolarSystem prod = polar_generators(cusp, PolarMode::PolarProduct);
    POPInstance a = augmented_problem(cusp, prod);
    CHECK(a.eqs == prod.generators);
    CHECK(a.ineqs == cusp.ineqs);
    CHECK(a.f == cusp.f);

    PolarSystem kkt = kkt_system(cusp);
    POPInstance k = augmented_problem(cusp, kkt);
    CHECK(k.nvars() == 4);
    CHECK(k.vars.size() == 4);
    CHECK(k.f == cusp.f.extended(4));
    CHECK(k.eqs.size() == 2 + 2);
  }
}
