#include "momopt/polar.hpp"

#include <string>

#include "momopt/error.hpp"

namespace momopt {

const char* to_string(PolarMode m) {
  switch (m) {
    case PolarMode::KKT: return "kkt";
    case PolarMode::PolarProduct: return "product";
    case PolarMode::PolarBranch: return "branch";
  }
  return "unknown";
}

std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& polys) {
  std::vector<std::vector<Polynomial>> rows;
  for (const auto& p : polys) {
    std::vector<Polynomial> row;
    for (std::size_t i = 0; i < p.nvars(); ++i) row.push_back(differentiate(p, i));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// Laplace expansion along the first row; the matrices here are tiny.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  std::size_t l = m.size();
  if (l == 1) return m[0][0];
  std::size_t n = m[0][0].nvars();
  Polynomial det(n);
  for (std::size_t j = 0; j < l; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial>> sub;
    for (std::size_t i = 1; i < l; ++i) {
      std::vector<Polynomial> row;
      for (std::size_t k = 0; k < l; ++k)
        if (k != j) row.push_back(m[i][k]);
      sub.push_back(std::move(row));
    }
    Polynomial term = m[0][j] * determinant(sub);
    if (j % 2 == 0)
      det += term;
    else
      det -= term;
  }
  return det;
}

// Lexicographic l-subsets of {0..n-1}.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t l) {
  std::vector<std::vector<std::size_t>> out;
  if (l > n) return out;
  std::vector<std::size_t> idx(l);
  for (std::size_t i = 0; i < l; ++i) idx[i] = i;
  for (;;) {
    out.push_back(idx);
    std::size_t i = l;
    while (i > 0 && idx[i - 1] == n - l + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < l; ++k) idx[k] = idx[k - 1] + 1;
  }
  return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Factor {
  std::vector<std::size_t> active;
  std::vector<Polynomial> gens;  // nonzero generators only
  bool whole_ring = false;
};

Factor factor_for(const POPInstance& pop, const std::vector<std::size_t>& active) {
  Factor fac;
  fac.active = active;
  for (std::size_t a : active)
    if (!pop.ineqs[a].is_zero()) fac.gens.push_back(pop.ineqs[a]);
  std::vector<Polynomial> rows{pop.f};
  rows.insert(rows.end(), pop.eqs.begin(), pop.eqs.end());
  for (std::size_t a : active) rows.push_back(pop.ineqs[a]);
  std::size_t l = rows.size();
  if (l <= pop.nvars())
    for (auto& m : minors(jacobian(rows), l))
      if (!m.is_zero()) fac.gens.push_back(std::move(m));
  for (const auto& g : fac.gens)
    if (g.is_nonzero_constant()) fac.whole_ring = true;
  return fac;
}

std::vector<Factor> surviving_factors(const POPInstance& pop) {
  std::vector<Factor> out;
  std::size_t r = pop.ineqs.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << r); ++mask) {
    std::vector<std::size_t> active;
    for (std::size_t a = 0; a < r; ++a)
      if (mask & (std::size_t{1} << a)) active.push_back(a);
    Factor fac = factor_for(pop, active);
    if (!fac.whole_ring) out.push_back(std::move(fac));
  }
  return out;
}

}  // namespace

std::vector<Polynomial> minors(const std::vector<std::vector<Polynomial>>& matrix, std::size_t l) {
  std::vector<Polynomial> out;
  if (matrix.empty() || l == 0) return out;
  std::size_t m = matrix.size(), n = matrix[0].size();
  for (const auto& rs : subsets(m, l))
    for (const auto& cs : subsets(n, l)) {
      std::vector<std::vector<Polynomial>> sub;
      for (std::size_t i : rs) {
        std::vector<Polynomial> row;
        for (std::size_t j : cs) row.push_back(matrix[i][j]);
        sub.push_back(std::move(row));
      }
      out.push_back(determinant(sub));
    }
  return out;
}

std::size_t minor_count(std::size_t m, std::size_t n, std::size_t l) {
  return binomial(m, l) * binomial(n, l);
}

PolarSystem kkt_system(const POPInstance& pop) {
  pop.validate();
  PolarSystem sys;
  sys.mode = PolarMode::KKT;
  std::size_t n = pop.nvars(), r = pop.ineqs.size(), s = pop.eqs.size();
  std::size_t total = n + r + s;
  std::vector<std::string> extra;
  for (std::size_t k = 0; k < r; ++k) extra.push_back("lambda_" + std::to_string(k + 1));
  for (std::size_t j = 0; j < s; ++j) extra.push_back("gamma_" + std::to_string(j + 1));
  sys.vars = pop.vars.size() == n ? pop.vars.extended(extra) : VariableTable();

  auto ext = [&](const Polynomial& p) { return p.extended(total); };
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial stat = ext(differentiate(pop.f, i));
    for (std::size_t k = 0; k < r; ++k) {
      Polynomial lam = Polynomial::variable(total, n + k);
      stat -= lam * lam * ext(differentiate(pop.ineqs[k], i));
    }
    for (std::size_t j = 0; j < s; ++j)
      stat -= Polynomial::variable(total, n + r + j) * ext(differentiate(pop.eqs[j], i));
    sys.generators.push_back(std::move(stat));
  }
  for (std::size_t k = 0; k < r; ++k)
    sys.generators.push_back(Polynomial::variable(total, n + k) * ext(pop.ineqs[k]));
  for (const auto& h : pop.eqs) sys.generators.push_back(ext(h));
  for (const auto& g : pop.ineqs) sys.inequalities.push_back(ext(g));
  return sys;
}

PolarSystem polar_generators(const POPInstance& pop, PolarMode mode, const PolarCaps& caps) {
  pop.validate();
  if (mode == PolarMode::KKT) return kkt_system(pop);
  PolarSystem sys;
  sys.mode = mode;
  sys.vars = pop.vars;
  std::size_t r = pop.ineqs.size();
  if (mode == PolarMode::PolarProduct && r > caps.max_ineq)
    throw Error(ErrorCode::CapExceeded, std::to_string(r) + " inequalities exceed the product cap of " +
                                            std::to_string(caps.max_ineq) + "; use branch or kkt mode");
  if (r >= 8 * sizeof(std::size_t) - 1) throw Error(ErrorCode::CapExceeded, "too many inequalities");
  std::vector<Factor> factors = surviving_factors(pop);

  if (mode == PolarMode::PolarBranch) {
    for (auto& fac : factors) {
      PolarBranchSystem br;
      br.active = fac.active;
      br.equalities = pop.eqs;
      br.equalities.insert(br.equalities.end(), fac.gens.begin(), fac.gens.end());
      std::size_t next = 0;
      for (std::size_t a = 0; a < r; ++a) {
        if (next < fac.active.size() && fac.active[next] == a) {
          ++next;
          continue;
        }
        br.inequalities.push_back(pop.ineqs[a]);
      }
      sys.branches.push_back(std::move(br));
    }
    return sys;
  }

  sys.generators = pop.eqs;
  sys.inequalities = pop.ineqs;
  // A factor without nonzero generators is the zero ideal, and so is the product.
  for (const auto& fac : factors)
    if (fac.gens.empty()) return sys;
  // With every factor equal to the whole ring the product is (1): no minimizer.
  if (factors.empty()) {
    sys.generators.push_back(Polynomial::constant(pop.nvars(), 1.0));
    return sys;
  }
  std::size_t count = 1;
  for (const auto& fac : factors) {
    count *= fac.gens.size();
    if (count > caps.max_gens)
      throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(caps.max_gens) +
                                              " product generators; use branch or kkt mode");
  }
  std::vector<std::size_t> pick(factors.size(), 0);
  for (;;) {
    Polynomial prod = Polynomial::constant(pop.nvars(), 1.0);
    for (std::size_t i = 0; i < factors.size(); ++i) prod = prod * factors[i].gens[pick[i]];
    sys.generators.push_back(std::move(prod));
    std::size_t i = 0;
    while (i < factors.size() && ++pick[i] == factors[i].gens.size()) pick[i++] = 0;
    if (i == factors.size()) break;
  }
  return sys;
}

POPInstance augmented_problem(const POPInstance& pop, const PolarSystem& sys) {
  if (sys.mode == PolarMode::PolarBranch)
    throw Error(ErrorCode::InvalidArgument, "branch systems are solved one at a time");
  POPInstance out;
  if (sys.mode == PolarMode::KKT) {
    std::size_t total = sys.generators.empty() ? pop.nvars() : sys.generators.front().nvars();
    out.f = pop.f.extended(total);
    out.vars = sys.vars;
  } else {
    out.f = pop.f;
    out.vars = pop.vars;
  }
  out.ineqs = sys.inequalities;
  out.eqs = sys.generators;
  return out;
}

}  // namespace momopt
