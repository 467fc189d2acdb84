#include "momopt/relaxation.hpp"

#include <algorithm>

#include "momopt/error.hpp"

namespace momopt {

namespace {

int half_up(int deg) { return deg <= 0 ? 0 : (deg + 1) / 2; }

Eigen::RowVectorXd coefficient_row(const MonomialBasis& basis, const Polynomial& p) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [m, c] : p.terms()) row[static_cast<Eigen::Index>(basis.index(m))] += c;
  return row;
}

LmiBlock make_block(const MonomialBasis& moments, const Polynomial& g, int t, BlockKind kind) {
  LmiBlock blk;
  blk.kind = kind;
  blk.generator = g;
  blk.degree = t;
  auto rows = MonomialBasis::get(moments.nvars(), t);
  blk.size = static_cast<int>(rows->size());
  for (int i = 0; i < blk.size; ++i) {
    for (int j = i; j < blk.size; ++j) {
      Monomial ab = (*rows)[static_cast<std::size_t>(i)] * (*rows)[static_cast<std::size_t>(j)];
      for (const auto& [m, c] : g.terms()) blk.entries.push_back({i, j, moments.index(ab * m), c});
    }
  }
  return blk;
}

void add_ideal_rows(SdpProblem& prob, const Polynomial& h) {
  if (h.is_zero()) return;
  int top = 2 * prob.order - h.degree();
  if (top < 0) throw Error(ErrorCode::DegreeTooHigh, "equality degree exceeds 2 * order");
  for (const Monomial& gamma : monomials_up_to(prob.nvars, top))
    prob.add_equality(Polynomial::monomial(gamma) * h, 0.0);
}

}  // namespace

int POPInstance::max_degree() const {
  int d = f.degree();
  for (const auto& g : ineqs) d = std::max(d, g.degree());
  for (const auto& h : eqs) d = std::max(d, h.degree());
  return d;
}

void POPInstance::validate() const {
  std::size_t n = f.nvars();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "objective has no variables");
  for (const auto& g : ineqs)
    if (g.nvars() != n) throw Error(ErrorCode::LengthMismatch, "inequality variable count");
  for (const auto& h : eqs)
    if (h.nvars() != n) throw Error(ErrorCode::LengthMismatch, "equality variable count");
  if (vars.size() != 0 && vars.size() != n)
    throw Error(ErrorCode::LengthMismatch, "variable table size");
}

int minimal_order(const POPInstance& pop) { return std::max(1, half_up(pop.max_degree())); }

Eigen::MatrixXd LmiBlock::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd m = constant.size() ? constant : Eigen::MatrixXd::Zero(size, size);
  for (const auto& e : entries) {
    double v = e.coef * y[static_cast<Eigen::Index>(e.var)];
    m(e.row, e.col) += v;
    if (e.row != e.col) m(e.col, e.row) += v;
  }
  return m;
}

void SdpProblem::add_equality(const Polynomial& p, double rhs) {
  Eigen::RowVectorXd row = coefficient_row(*basis, p);
  Eigen::Index r = A.rows();
  A.conservativeResize(r + 1, row.size());
  A.row(r) = row;
  b.conservativeResize(r + 1);
  b[r] = rhs;
  equality_polys.push_back(p);
}

std::vector<Polynomial> expand_preordering(const std::vector<Polynomial>& g) {
  if (g.size() > kMaxPreorderingGenerators)
    throw Error(ErrorCode::TooManyGenerators,
                std::to_string(g.size()) + " generators, at most 6 allowed for the preordering");
  std::vector<Polynomial> out;
  std::size_t s = g.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << s); ++mask) {
    Polynomial p;
    bool first = true;
    for (std::size_t i = 0; i < s; ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      p = first ? g[i] : p * g[i];
      first = false;
    }
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

SdpProblem build_mom_relaxation(const POPInstance& pop, int d, RelaxationMode mode) {
  pop.validate();
  if (d < 1 || d < half_up(pop.max_degree()))
    throw Error(ErrorCode::OrderTooSmall,
                "order " + std::to_string(d) + " below ceil(deg / 2) = " +
                    std::to_string(half_up(pop.max_degree())));
  SdpProblem prob;
  prob.nvars = pop.nvars();
  prob.order = d;
  prob.mode = mode;
  prob.basis = MonomialBasis::get(prob.nvars, 2 * d);
  auto m = static_cast<Eigen::Index>(prob.basis->size());
  prob.A.resize(0, m);
  prob.b.resize(0);

  Polynomial one = Polynomial::constant(prob.nvars, 1.0);
  prob.blocks.push_back(make_block(*prob.basis, one, d, BlockKind::Moment));

  std::vector<Polynomial> gens =
      mode == RelaxationMode::Preordering ? expand_preordering(pop.ineqs) : pop.ineqs;
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    int t = d - half_up(g.degree());
    if (t < 0)
      throw Error(ErrorCode::EmptyGeneratorDegree,
                  "localizing block of negative degree at order " + std::to_string(d));
    prob.blocks.push_back(make_block(*prob.basis, g, t, BlockKind::Localizing));
  }

  prob.add_equality(one, 1.0);
  for (const auto& h : pop.eqs) add_ideal_rows(prob, h);

  prob.objective = pop.f;
  prob.c = coefficient_row(*prob.basis, pop.f).transpose();
  return prob;
}

SdpProblem add_level_constraint(const SdpProblem& problem, const Polynomial& f, double v) {
  if (f.degree() > 2 * problem.order)
    throw Error(ErrorCode::DegreeTooHigh, "level polynomial degree exceeds 2 * order");
  SdpProblem out = problem;
  add_ideal_rows(out, f - Polynomial::constant(f.nvars(), v));
  out.c.setZero();
  out.objective = Polynomial(f.nvars());
  return out;
}

}  // namespace momopt
