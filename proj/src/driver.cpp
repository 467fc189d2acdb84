#include "momopt/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "momopt/error.hpp"

namespace momopt {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Exact: return "Exact";
    case RunStatus::MaxOrderReached: return "MaxOrderReached";
    case RunStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

int RunConfig::first_order(const POPInstance& pop) const {
  return initial_order > 0 ? initial_order : minimal_order(pop);
}

int RunConfig::last_order(const POPInstance& pop) const {
  return max_order > 0 ? max_order : first_order(pop) + 4;
}

void RunConfig::validate(const POPInstance& pop) const {
  pop.validate();
  solver.validate();
  if (first_order(pop) < minimal_order(pop))
    throw Error(ErrorCode::OrderTooSmall, "order " + std::to_string(first_order(pop)) +
                                              " is below ceil(deg / 2) = " +
                                              std::to_string(minimal_order(pop)));
  if (last_order(pop) < first_order(pop))
    throw Error(ErrorCode::InvalidArgument, "max_order is below the initial order");
  if (!(residual_tol > 0.0) || !(level_tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-6;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Coarse rank threshold first (singular values below residual_tol relative to
// the largest count as zero), then the default rank tolerance.
ExtractionResult extract_with(const MomentVector& sigma, const RunConfig& cfg) {
  ExtractionResult first;
  for (double rank_tol : {cfg.residual_tol, 0.0}) {
    ExtractOptions eo;
    eo.rank_tol = rank_tol;
    eo.residual_tol = cfg.residual_tol;
    eo.seed = cfg.seed;
    ExtractionResult ex = extract_measure(sigma, eo);
    if (ex.ok) return ex;
    if (rank_tol == 0.0) return ex;
    first = std::move(ex);
  }
  return first;
}

bool points_valid(const POPInstance& pop, const ExtractedMeasure& m, double f_star, double residual_tol,
                  std::string& why) {
  for (const auto& p : m.points) {
    for (const auto& g : pop.ineqs)
      if (g.evaluate(p) < -kFeasTol) {
        why = "extracted point violates an inequality";
        return false;
      }
    for (const auto& h : pop.eqs)
      if (std::abs(h.evaluate(p)) > kFeasTol) {
        why = "extracted point violates an equality";
        return false;
      }
    if (std::abs(pop.f.evaluate(p) - f_star) > 10.0 * residual_tol) {
      why = "objective at an extracted point is far from f_star";
      return false;
    }
  }
  return true;
}

bool level_feasible(const SdpProblem& base, const Polynomial& f, double v, const SolverOptions& opts) {
  Phase1Result p = phase1(add_level_constraint(base, f, v), opts);
  // Ambiguous levels lie within the margin of the boundary.
  return p.status == FeasibilityStatus::StrictlyFeasible || p.status == FeasibilityStatus::Ambiguous;
}

// Smallest level whose level-constrained relaxation is feasible, bracketed by
// bisection from `start`.
bool search_level(const SdpProblem& base, const Polynomial& f, double start, const RunConfig& cfg,
                  double& level) {
  if (!std::isfinite(start)) start = 0.0;
  double step = 1e-6 * std::max(1.0, std::abs(start));
  double lo = 0.0, hi = 0.0;
  constexpr int kSteps = 30;
  if (level_feasible(base, f, start, cfg.solver)) {
    hi = start;
    bool bracketed = false;
    for (int i = 0; i < kSteps && !bracketed; ++i, step *= 4.0) {
      lo = start - step;
      if (level_feasible(base, f, lo, cfg.solver))
        hi = lo;
      else
        bracketed = true;
    }
    if (!bracketed) return false;
  } else {
    lo = start;
    bool found = false;
    for (int i = 0; i < kSteps && !found; ++i, step *= 4.0) {
      hi = start + step;
      if (level_feasible(base, f, hi, cfg.solver))
        found = true;
      else
        lo = hi;
    }
    if (!found) return false;
  }
  while (hi - lo > cfg.level_tol * std::max(1.0, std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (level_feasible(base, f, mid, cfg.solver))
      hi = mid;
    else
      lo = mid;
  }
  level = hi;
  return true;
}

struct LevelAttempt {
  GenericPoint gp;
  ExtractionResult ex;
  bool ok = false;
  std::string why;
};

LevelAttempt try_level(const POPInstance& pop, const SdpProblem& problem, double v, const RunConfig& cfg,
                       OrderTrace& tr) {
  LevelAttempt at;
  auto t0 = Clock::now();
  at.gp = generic_point(add_level_constraint(problem, pop.f, v), cfg.solver);
  tr.generic_ms += ms_since(t0);
  tr.generic_status = at.gp.status;
  if (at.gp.status != SolveStatus::Optimal) {
    at.why = "generic point: " + std::string(to_string(at.gp.status));
    return at;
  }
  t0 = Clock::now();
  at.ex = extract_with(at.gp.sigma, cfg);
  tr.extract_ms += ms_since(t0);
  tr.extracted = at.ex.ok;
  tr.extraction_failure = at.ex.failure;
  tr.ranks = at.ex.ranks;
  tr.residual = at.ex.residual;
  if (!at.ex.ok) {
    at.why = "extraction: " + std::string(to_string(at.ex.failure));
    return at;
  }
  double f_star = apply(at.gp.sigma, pop.f);
  at.ok = points_valid(pop, at.ex.measure, f_star, cfg.residual_tol, at.why);
  tr.extracted = at.ok;
  return at;
}

void fill_values(OrderTrace& tr, const SolveResult& sr) {
  tr.solve_status = sr.status;
  switch (sr.status) {
    case SolveStatus::Optimal:
      tr.v_mom = sr.objective;
      tr.v_sos = sr.dual_objective;
      tr.gap = std::abs(sr.objective - sr.dual_objective);
      break;
    case SolveStatus::Unbounded:
      // Weak duality leaves the sums-of-squares side infeasible as well.
      tr.v_mom = -kInf;
      tr.v_sos = -kInf;
      tr.gap = kNaN;
      break;
    default:
      tr.v_mom = kNaN;
      tr.v_sos = kNaN;
      tr.gap = kNaN;
  }
}

ExtractedMeasure project_measure(const ExtractedMeasure& m, std::size_t n, double tol) {
  ExtractedMeasure out = m;
  out.points.clear();
  out.weights.clear();
  for (std::size_t k = 0; k < m.points.size(); ++k) {
    std::vector<double> p(m.points[k].begin(), m.points[k].begin() + static_cast<std::ptrdiff_t>(n));
    bool merged = false;
    for (std::size_t j = 0; j < out.points.size() && !merged; ++j) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(out.points[j][i] - p[i]));
      if (d <= tol) {
        out.weights[j] += m.weights[k];
        merged = true;
      }
    }
    if (!merged) {
      out.points.push_back(std::move(p));
      out.weights.push_back(m.weights[k]);
    }
  }
  out.rank = out.points.size();
  return out;
}

}  // namespace

MinimizeResult minimize(const POPInstance& pop, int d, const RunConfig& cfg) {
  RunConfig c = cfg;
  c.initial_order = d;
  c.max_order = d;
  c.validate(pop);
  MinimizeResult out;
  out.trace.order = d;
  auto t0 = Clock::now();
  SdpProblem problem = build_mom_relaxation(pop, d, cfg.mode);
  out.solve = solve(problem, cfg.solver);
  out.trace.solve_ms = ms_since(t0);
  fill_values(out.trace, out.solve);
  out.trace.message = out.solve.message;
  out.v = out.solve.objective;
  if (out.solve.y.size() == static_cast<Eigen::Index>(problem.num_vars()))
    out.sigma = MomentVector(pop.nvars(), 2 * d, out.solve.y);
  if (out.solve.status == SolveStatus::Optimal) {
    t0 = Clock::now();
    out.extraction = extract_with(out.sigma, cfg);
    out.trace.extract_ms = ms_since(t0);
    out.trace.extracted = out.extraction.ok;
    out.trace.extraction_failure = out.extraction.failure;
    out.trace.ranks = out.extraction.ranks;
    out.trace.residual = out.extraction.residual;
  }
  return out;
}

RunReport finite_minimizers(const POPInstance& pop, const RunConfig& cfg) {
  cfg.validate(pop);
  auto start = Clock::now();
  RunReport rep;
  rep.status = RunStatus::MaxOrderReached;
  const int k0 = cfg.first_order(pop), k1 = cfg.last_order(pop);
  for (int k = k0; k <= k1; ++k) {
    OrderTrace tr;
    tr.order = k;
    auto t0 = Clock::now();
    SdpProblem problem = build_mom_relaxation(pop, k, cfg.mode);
    SolveResult sr = solve(problem, cfg.solver);
    tr.solve_ms = ms_since(t0);
    fill_values(tr, sr);
    if (sr.status == SolveStatus::Infeasible) {
      // Higher orders only add constraints, so they are infeasible too.
      tr.message = "relaxation infeasible";
      rep.trace.push_back(std::move(tr));
      rep.status = RunStatus::Infeasible;
      rep.message = "relaxation of order " + std::to_string(k) + " is infeasible";
      break;
    }

    LevelAttempt at;
    if (sr.status == SolveStatus::Optimal) {
      tr.level = sr.objective;
      at = try_level(pop, problem, tr.level, cfg, tr);
    }
    if (!at.ok) {
      // The level at f*_MoM may be empty or not flat (the relaxation value is
      // not attained or is inaccurate): use the lowest feasible level instead.
      double level = 0.0;
      t0 = Clock::now();
      bool found = search_level(problem, pop.f, sr.objective, cfg, level);
      tr.generic_ms += ms_since(t0);
      if (found && !(sr.status == SolveStatus::Optimal && level == tr.level)) {
        tr.level = level;
        tr.level_searched = true;
        at = try_level(pop, problem, level, cfg, tr);
      } else if (!found) {
        at.why = "no feasible level found";
      }
    }
    tr.message = at.ok ? "extracted" : at.why;
    rep.trace.push_back(tr);
    if (at.ok) {
      rep.status = RunStatus::Exact;
      rep.f_star = apply(at.gp.sigma, pop.f);
      rep.minimizers = at.ex.measure;
      rep.message = "minimizers extracted at order " + std::to_string(k);
      break;
    }
  }
  if (rep.status == RunStatus::MaxOrderReached) {
    rep.message = "no extraction up to order " + std::to_string(k1);
    for (const auto& tr : rep.trace)
      if (tr.level_searched || tr.solve_status == SolveStatus::Optimal) rep.f_star = tr.level;
  }
  rep.total_ms = ms_since(start);
  return rep;
}

RunReport polar_minimize(const POPInstance& pop, int d, PolarMode mode, const RunConfig& cfg) {
  auto start = Clock::now();
  PolarSystem sys = polar_generators(pop, mode, cfg.caps);
  if (mode != PolarMode::PolarBranch) {
    POPInstance aug = augmented_problem(pop, sys);
    RunConfig c = cfg;
    c.initial_order = d;
    RunReport rep = finite_minimizers(aug, c);
    if (mode == PolarMode::KKT && rep.status == RunStatus::Exact)
      rep.minimizers = project_measure(rep.minimizers, pop.nvars(), cfg.residual_tol);
    rep.total_ms = ms_since(start);
    return rep;
  }

  RunReport best;
  best.status = RunStatus::Infeasible;
  bool any_exact = false, any_open = false;
  std::vector<OrderTrace> all;
  for (std::size_t b = 0; b < sys.branches.size(); ++b) {
    const auto& br = sys.branches[b];
    POPInstance sub;
    sub.f = pop.f;
    sub.vars = pop.vars;
    sub.ineqs = br.inequalities;
    sub.eqs = br.equalities;
    RunConfig c = cfg;
    c.initial_order = std::max(d, minimal_order(sub));
    if (cfg.max_order > 0) c.max_order = std::max(cfg.max_order, c.initial_order);
    RunReport rep = finite_minimizers(sub, c);
    for (auto tr : rep.trace) {
      tr.branch = static_cast<int>(b);
      all.push_back(std::move(tr));
    }
    if (rep.status == RunStatus::Exact) {
      if (!any_exact || rep.f_star < best.f_star) best = rep;
      any_exact = true;
    } else if (rep.status == RunStatus::MaxOrderReached) {
      any_open = true;
    }
  }
  if (!any_exact) {
    best = RunReport{};
    best.status = any_open ? RunStatus::MaxOrderReached : RunStatus::Infeasible;
    best.message = any_open ? "no branch extracted minimizers" : "every branch is infeasible";
  } else if (any_open) {
    best.message += "; some branches stayed inconclusive";
  }
  best.trace = std::move(all);
  best.total_ms = ms_since(start);
  return best;
}

}  // namespace momopt
