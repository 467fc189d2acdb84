#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "momopt/driver.hpp"
#include "momopt/error.hpp"

using namespace momopt;
using fixtures::make_pop;

namespace {

using Points = std::vector<std::vector<double>>;

// Feasibility of every atom and agreement of f with the reported value.
void check_exact_report(const POPInstance& pop, const RunReport& rep, const RunConfig& cfg) {
  REQUIRE(rep.status == RunStatus::Exact);
  CHECK(rep.minimizers.residual <= cfg.residual_tol);
  REQUIRE(!rep.minimizers.points.empty());
  for (const auto& x : rep.minimizers.points) {
    for (const auto& g : pop.ineqs) CHECK(g.evaluate(x) >= -1e-6);
    for (const auto& h : pop.eqs) CHECK(std::abs(h.evaluate(x)) <= 1e-6);
    CHECK(std::abs(pop.f.evaluate(x) - rep.f_star) <= 10 * cfg.residual_tol);
  }
}

// One entry per order from the first one up to where the run stopped.
void check_trace(const RunReport& rep, int first) {
  REQUIRE(!rep.trace.empty());
  for (std::size_t i = 0; i < rep.trace.size(); ++i) CHECK(rep.trace[i].order == first + static_cast<int>(i));
  double prev = -INFINITY;
  for (const auto& tr : rep.trace) {
    if (tr.solve_status != SolveStatus::Optimal) continue;
    CHECK(tr.v_mom >= prev - 1e-6);
    prev = tr.v_mom;
  }
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("minimize x^2 at order 1") {
    MinimizeResult r = minimize(make_pop("x", "x^2"), 1);
    REQUIRE(r.solve.status == SolveStatus::Optimal);
    CHECK(std::abs(r.v) <= 1e-7);
    CHECK(r.sigma[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.sigma[1]) <= 1e-6);
    CHECK(std::abs(r.sigma[2]) <= 1e-6);
    CHECK(r.trace.v_sos <= r.trace.v_mom + 1e-6);
    CHECK(r.trace.gap == doctest::Approx(r.trace.v_mom - r.trace.v_sos));
  }

  TEST_CASE("minimize Motzkin at order 4 reports an unbounded relaxation") {
    MinimizeResult r = minimize(fixtures::motzkin(), 4);
    CHECK(r.solve.status == SolveStatus::Unbounded);
    CHECK(r.trace.v_mom == -INFINITY);
    CHECK(r.trace.v_sos == -INFINITY);
  }

  TEST_CASE("minimize Robinson on the sphere at order 5") {
    MinimizeResult r = minimize(fixtures::robinson_sphere(), 5);
    REQUIRE(r.solve.status == SolveStatus::Optimal);
    CHECK(std::abs(r.v) <= 1e-4);
  }

  TEST_CASE("order validation") {
    CHECK_THROWS_AS(minimize(fixtures::motzkin(), 2), Error);
    RunConfig cfg;
    cfg.initial_order = 5;
    cfg.max_order = 4;
    CHECK_THROWS_AS(cfg.validate(fixtures::motzkin()), Error);
    RunConfig d;
    CHECK(d.first_order(fixtures::motzkin()) == 3);
    CHECK(d.last_order(fixtures::motzkin()) == 7);
  }

  TEST_CASE("finite minimizers of x^2") {
    POPInstance pop = make_pop("x", "x^2");
    RunConfig cfg;
    RunReport rep = finite_minimizers(pop, cfg);
    check_exact_report(pop, rep, cfg);
    check_trace(rep, 1);
    CHECK(rep.trace.size() == 1);
    REQUIRE(rep.minimizers.points.size() == 1);
    CHECK(std::abs(rep.minimizers.points[0][0]) <= 1e-6);
    CHECK(rep.minimizers.weights[0] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("finite minimizers of the Motzkin polynomial") {
    POPInstance pop = fixtures::motzkin();
    RunConfig cfg;
    cfg.initial_order = 4;
    RunReport rep = finite_minimizers(pop, cfg);
    check_exact_report(pop, rep, cfg);
    check_trace(rep, 4);
    CHECK(std::abs(rep.f_star) <= 1e-5);
    REQUIRE(rep.minimizers.points.size() == 4);
    Points corners{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& p : rep.minimizers.points) CHECK(fixtures::nearest(p, corners) <= 1e-3);
  }

  TEST_CASE("finite minimizers on the gradient variety") {
    POPInstance pop = fixtures::gradient_variety();
    RunConfig cfg;
    cfg.initial_order = 4;
    cfg.residual_tol = 2e-2;
    RunReport rep = finite_minimizers(pop, cfg);
    check_exact_report(pop, rep, cfg);
    CHECK(std::abs(rep.f_star) <= 1e-5);
    REQUIRE(rep.minimizers.points.size() == 1);
    CHECK(fixtures::distance(rep.minimizers.points[0], {0, 0, 0}) <= 2e-2);
  }

  TEST_CASE("an infeasible set is reported as such") {
    POPInstance pop = make_pop("x", "x", {"-1 - x^2"});
    RunReport rep = finite_minimizers(pop);
    CHECK(rep.status == RunStatus::Infeasible);
    REQUIRE(rep.trace.size() == 1);
    CHECK(rep.trace[0].solve_status == SolveStatus::Infeasible);
    CHECK(!rep.message.empty());
  }

  TEST_CASE("a failing run still records every order") {
    // The minimizers form the unit circle, so no finite atomic measure fits.
    POPInstance pop = make_pop("x,y", "(x^2 + y^2 - 1)^2");
    RunConfig cfg;
    cfg.initial_order = 2;
    cfg.max_order = 4;
    RunReport rep = finite_minimizers(pop, cfg);
    CHECK(rep.status == RunStatus::MaxOrderReached);
    CHECK(rep.trace.size() == 3);
    check_trace(rep, 2);
    for (const auto& tr : rep.trace) {
      CHECK_FALSE(tr.extracted);
      CHECK(!tr.message.empty());
    }
    CHECK(std::abs(rep.f_star) <= 1e-5);
  }

  TEST_CASE("polar minimization of the singular cusp") {
    POPInstance pop = fixtures::singular_cusp();
    RunConfig cfg;
    cfg.residual_tol = 2e-3;
    for (auto mode : {PolarMode::PolarProduct, PolarMode::PolarBranch}) {
      CAPTURE(to_string(mode));
      RunReport rep = polar_minimize(pop, 5, mode, cfg);
      check_exact_report(pop, rep, cfg);
      CHECK(std::abs(rep.f_star) <= 5e-3);
      REQUIRE(rep.minimizers.points.size() == 1);
      CHECK(fixtures::distance(rep.minimizers.points[0], {0, 0}) <= 5e-3);
    }
  }

  TEST_CASE("polar minimization adds the gradient ideal") {
    POPInstance pop = make_pop("x,y", "x^2 + y^2");
    RunConfig cfg;
    RunReport rep = polar_minimize(pop, 1, PolarMode::PolarProduct, cfg);
    check_exact_report(pop, rep, cfg);
    REQUIRE(rep.minimizers.points.size() == 1);
    CHECK(fixtures::distance(rep.minimizers.points[0], {0, 0}) <= 1e-6);
  }

  TEST_CASE("KKT mode finds no point when the constraint qualification fails") {
    RunConfig cfg;
    cfg.max_order = 4;
    RunReport rep = polar_minimize(make_pop("x", "x", {"x^3"}), 2, PolarMode::KKT, cfg);
    CHECK(rep.status == RunStatus::Infeasible);
  }

  TEST_CASE("KKT mode projects the minimizers to the original variables") {
    POPInstance pop = make_pop("x,y", "x + y", {}, {"x^2 + y^2 - 1"});
    RunConfig cfg;
    RunReport rep = polar_minimize(pop, 2, PolarMode::KKT, cfg);
    REQUIRE(rep.status == RunStatus::Exact);
    REQUIRE(rep.minimizers.points.size() == 1);
    CHECK(rep.minimizers.points[0].size() == 2);
    double s = -std::sqrt(0.5);
    CHECK(fixtures::distance(rep.minimizers.points[0], {s, s}) <= 1e-4);
    CHECK(rep.f_star == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-5));
  }

  TEST_CASE("product caps surface as errors") {
    POPInstance pop = make_pop("x,y", "x", {"x", "y", "1 - x", "1 - y"});
    CHECK_THROWS_AS(polar_minimize(pop, 1, PolarMode::PolarProduct), Error);
  }

  TEST_CASE("runs are deterministic") {
    POPInstance pop = fixtures::motzkin();
    RunConfig cfg;
    cfg.initial_order = 4;
    RunReport a = finite_minimizers(pop, cfg), b = finite_minimizers(pop, cfg);
    CHECK(a.f_star == b.f_star);
    CHECK(a.minimizers.points == b.minimizers.points);
  }
}
