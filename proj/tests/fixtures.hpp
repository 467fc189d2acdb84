#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "momopt/polar.hpp"
#include "momopt/polyparse.hpp"
#include "momopt/relaxation.hpp"

namespace fixtures {

inline momopt::POPInstance make_pop(const std::string& vars, const std::string& f,
                                    const std::vector<std::string>& ineqs = {},
                                    const std::vector<std::string>& eqs = {}) {
  momopt::POPInstance pop;
  pop.vars = momopt::VariableTable::from_list(vars);
  pop.f = momopt::parse_polynomial(f, pop.vars);
  for (const auto& g : ineqs) pop.ineqs.push_back(momopt::parse_polynomial(g, pop.vars));
  for (const auto& h : eqs) pop.eqs.push_back(momopt::parse_polynomial(h, pop.vars));
  return pop;
}

inline const char* kMotzkin = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1";
inline const char* kRobinson =
    "x^6 + y^6 + z^6 - (x^4*y^2 + x^2*y^4 + x^4*z^2 + x^2*z^4 + y^4*z^2 + y^2*z^4) + 3*x^2*y^2*z^2";
inline const char* kGradientObjective = "x^4*y^2 + x^2*y^4 + z^6 - 2*x^2*y^2*z^2 + x^8 + y^8 + z^8";

inline momopt::POPInstance motzkin() { return make_pop("x,y", kMotzkin); }

inline momopt::POPInstance robinson_sphere() {
  return make_pop("x,y,z", kRobinson, {}, {"x^2 + y^2 + z^2 - 1"});
}

inline momopt::POPInstance gradient_variety() {
  momopt::POPInstance pop = make_pop("x,y,z", kGradientObjective);
  for (std::size_t i = 0; i < 3; ++i) pop.eqs.push_back(momopt::differentiate(pop.f, i));
  return pop;
}

inline momopt::POPInstance singular_cusp() {
  return make_pop("x,y", "x", {"x^3 - y^2", "1 - x^2 - y^2"});
}

/// The 20 minimizers of the Robinson form on the unit sphere.
inline std::vector<std::vector<double>> robinson_minimizers() {
  std::vector<std::vector<double>> pts;
  const double a = std::sqrt(3.0) / 3.0, b = std::sqrt(2.0) / 2.0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) pts.push_back({sx * a, sy * a, sz * a});
  for (int zero = 0; zero < 3; ++zero)
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        std::vector<double> p(3, 0.0);
        int k = 0;
        for (int i = 0; i < 3; ++i)
          if (i != zero) p[i] = (k++ == 0 ? s1 : s2) * b;
        pts.push_back(p);
      }
  return pts;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& set) {
  double best = INFINITY;
  for (const auto& q : set) best = std::min(best, distance(p, q));
  return best;
}

/// Random polynomial with integer coefficients in [-9, 9].
inline momopt::Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, int max_deg,
                                            int terms) {
  std::uniform_int_distribution<int> coef(-9, 9), deg(0, max_deg);
  momopt::Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    int d = deg(rng);
    std::vector<int> e(n, 0);
    for (int k = 0; k < d; ++k) e[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]++;
    p += momopt::Polynomial::monomial(momopt::Monomial(e), coef(rng));
  }
  return p;
}

/// Atomic measure with r in {1..4} points in [-1,1]^n, n in {1,2,3}, pairwise
/// at least 0.2 apart, weights in [0.1, 1]; t = r is the extraction degree.
struct AtomicMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  int t = 0;
};

inline AtomicMeasure random_atomic_measure(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rd(1, 4), nd(1, 3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0), weight(0.1, 1.0);
  AtomicMeasure m;
  int r = rd(rng);
  std::size_t n = static_cast<std::size_t>(nd(rng));
  while (static_cast<int>(m.points.size()) < r) {
    std::vector<double> p(n);
    for (auto& x : p) x = coord(rng);
    bool far = true;
    for (const auto& q : m.points) far = far && distance(p, q) >= 0.2;
    if (far) m.points.push_back(std::move(p));
  }
  for (int i = 0; i < r; ++i) m.weights.push_back(weight(rng));
  m.t = r;
  return m;
}

/// Worst coordinate and weight errors after matching each recovered atom to
/// the closest unused true atom; inf when the counts differ.
inline std::pair<double, double> match_atoms(const AtomicMeasure& truth,
                                             const std::vector<std::vector<double>>& points,
                                             const std::vector<double>& weights) {
  if (points.size() != truth.points.size()) return {INFINITY, INFINITY};
  double perr = 0.0, werr = 0.0;
  std::vector<bool> used(truth.points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t j = 0; j < truth.points.size(); ++j) {
      double d = distance(points[i], truth.points[j]);
      if (!used[j] && d < bd) {
        bd = d;
        best = j;
      }
    }
    if (!std::isfinite(bd)) return {INFINITY, INFINITY};
    used[best] = true;
    for (std::size_t k = 0; k < points[i].size(); ++k)
      perr = std::max(perr, std::abs(points[i][k] - truth.points[best][k]));
    werr = std::max(werr, std::abs(weights[i] - truth.weights[best]));
  }
  return {perr, werr};
}

/// Two variables, up to two inequalities, degrees <= 3.
inline momopt::POPInstance random_polar_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rd(0, 2), degd(1, 3), terms(1, 4);
  momopt::POPInstance pop;
  pop.vars = momopt::VariableTable::from_list("x,y");
  auto nonconstant = [&] {
    for (;;) {
      momopt::Polynomial p = random_polynomial(rng, 2, degd(rng), terms(rng));
      if (p.degree() >= 1) return p;
    }
  };
  pop.f = nonconstant();
  int r = rd(rng);
  for (int k = 0; k < r; ++k) pop.ineqs.push_back(nonconstant());
  return pop;
}

/// A problem together with all of its minimizers.
struct KnownMinimizers {
  momopt::POPInstance pop;
  std::vector<std::vector<double>> minimizers;
};

inline std::vector<KnownMinimizers> fixtures_with_minimizers() {
  return {
      {motzkin(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}},
      {robinson_sphere(), robinson_minimizers()},
      {gradient_variety(), {{0, 0, 0}}},
      {singular_cusp(), {{0, 0}}},
  };
}

inline double max_abs_value(const std::vector<momopt::Polynomial>& ps, const std::vector<double>& x) {
  double m = 0.0;
  for (const auto& p : ps) m = std::max(m, std::abs(p.evaluate(x)));
  return m;
}

struct GridComparison {
  int mismatches = 0;
  int zeros = 0;
};

/// Grid points of step 0.05 on [-1,1]^2 where the product generators vanish
/// (to 1e-6) against those where some branch system vanishes.
inline GridComparison compare_product_and_branches(const momopt::POPInstance& pop) {
  using namespace momopt;
  PolarSystem prod = polar_generators(pop, PolarMode::PolarProduct);
  PolarSystem br = polar_generators(pop, PolarMode::PolarBranch);
  GridComparison out;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      std::vector<double> x{0.05 * i, 0.05 * j};
      bool in_product = max_abs_value(prod.generators, x) <= 1e-6;
      bool in_branch = std::any_of(br.branches.begin(), br.branches.end(), [&](const PolarBranchSystem& b) {
        return max_abs_value(b.equalities, x) <= 1e-6;
      });
      out.mismatches += in_product != in_branch;
      out.zeros += in_product;
    }
  return out;
}

}  // namespace fixtures
