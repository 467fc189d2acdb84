#include "momopt/sdpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "momopt/error.hpp"
#include "momopt/simd/kernels.hpp"

namespace momopt {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::StrictlyFeasible: return "StrictlyFeasible";
    case FeasibilityStatus::Infeasible: return "Infeasible";
    case FeasibilityStatus::Ambiguous: return "Ambiguous";
    case FeasibilityStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void SolverOptions::validate() const {
  if (!(gap_tol > 0 && feas_tol > 0 && infeasibility_margin > 0 && trace_penalty >= 0 &&
        divergence_trace > 0 && max_newton_iters > 0))
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  if (!(barrier_decrease > 0 && barrier_decrease < 1))
    throw Error(ErrorCode::InvalidArgument, "barrier_decrease must lie in (0, 1)");
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStructuralTol = 1e-10;
constexpr double kEqualityTol = 1e-10;
constexpr double kNewtonTol = 1e-10;
// Squared decrement still inside the region where the gap bound holds; used
// when rounding stops Newton from reaching kNewtonTol.
constexpr double kLooseNewtonTol = 1e-4;
constexpr int kStallSteps = 20;
constexpr int kMaxFacialReductions = 12;
// A block eigenvalue is treated as part of a forced kernel when it sits below
// this fraction of the block's largest eigenvalue and is separated from the
// next one by at least kKernelGap.
constexpr double kKernelCeiling = 1e-5;
constexpr double kKernelGap = 1e2;
constexpr double kFaceEquationTol = 1e-7;

// ---------------------------------------------------------------------------
// Affine subspaces

struct AffineSpace {
  VectorXd point;
  MatrixXd null;  // orthonormal basis of the direction space
  double residual = 0.0;
};

// Solutions of E x = e closest to `anchor`; singular values below
// rel_tol * max(sigma_max, scale) are treated as zero.
AffineSpace solve_affine(const MatrixXd& E, const VectorXd& e, const VectorXd& anchor,
                         double rel_tol, double scale = 0.0) {
  AffineSpace out;
  Index n = anchor.size();
  if (E.rows() == 0 || n == 0) {
    out.point = anchor;
    out.null = MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::BDCSVD<MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  double top = std::max(s.size() ? s[0] : 0.0, scale);
  Index r = 0;
  while (r < s.size() && s[r] > rel_tol * top && s[r] > 0.0) ++r;
  VectorXd rhs = e - E * anchor;
  VectorXd coeff = svd.matrixU().leftCols(r).transpose() * rhs;
  for (Index i = 0; i < r; ++i) coeff[i] /= s[i];
  out.point = anchor + svd.matrixV().leftCols(r) * coeff;
  out.null = svd.matrixV().rightCols(n - r);
  out.residual = (E * out.point - e).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Reduced problem: y = y0 + N z, each block restricted to a subspace V_b.

struct Block {
  std::size_t source = 0;
  MatrixXd V;  // original size x current size
  MatrixXd C;
  std::vector<MatrixXd> G;

  MatrixXd at(const VectorXd& z) const {
    MatrixXd m = C;
    for (std::size_t j = 0; j < G.size(); ++j) m.noalias() += z[static_cast<Index>(j)] * G[j];
    return m;
  }
};

struct Reduced {
  VectorXd y0;
  MatrixXd N;
  std::vector<Block> blocks;
  VectorXd ell;
  double ell0 = 0.0;
  VectorXd tau;
  double tau0 = 0.0;
  double moment_size = 0.0;
  int facial_reductions = 0;

  Index k() const { return N.cols(); }
  VectorXd lift(const VectorXd& z) const { return y0 + N * z; }
  std::size_t barrier_size() const {
    std::size_t s = 0;
    for (const auto& b : blocks) s += static_cast<std::size_t>(b.C.rows());
    return s;
  }
};

double min_eigenvalue(const MatrixXd& m) {
  if (m.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

// Drops the directions u with C u = 0 and G_j u = 0 for every j: these are
// kernel vectors of every matrix in the affine family.
void remove_structural_kernel(Block& blk) {
  Index s = blk.C.rows();
  if (s == 0) return;
  MatrixXd stack(s * static_cast<Index>(blk.G.size() + 1), s);
  stack.topRows(s) = blk.C;
  for (std::size_t j = 0; j < blk.G.size(); ++j)
    stack.middleRows(s * static_cast<Index>(j + 1), s) = blk.G[j];
  Eigen::BDCSVD<MatrixXd> svd(stack, Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  double top = sv.size() ? sv[0] : 0.0;
  Index r = 0;
  while (r < sv.size() && sv[r] > kStructuralTol * top && sv[r] > 0.0) ++r;
  if (r == s) return;
  MatrixXd W = svd.matrixV().leftCols(r);
  blk.V = blk.V * W;
  blk.C = W.transpose() * blk.C * W;
  for (auto& g : blk.G) g = W.transpose() * g * W;
}

struct ReduceOutcome {
  bool consistent = true;
  Reduced reduced;
};

ReduceOutcome reduce(const SdpProblem& prob) {
  ReduceOutcome out;
  Reduced& r = out.reduced;
  auto m = static_cast<Index>(prob.num_vars());
  AffineSpace as = solve_affine(prob.A, prob.b, VectorXd::Zero(m), kEqualityTol);
  double bscale = 1.0 + (prob.b.size() ? prob.b.cwiseAbs().maxCoeff() : 0.0);
  if (prob.A.rows() && as.residual > 1e-8 * bscale) {
    out.consistent = false;
    return out;
  }
  r.y0 = as.point;
  r.N = as.null;
  Index k = r.N.cols();

  r.ell = r.N.transpose() * prob.c;
  r.ell0 = prob.c.dot(r.y0);
  VectorXd tau_y = VectorXd::Zero(m);
  for (std::size_t b = 0; b < prob.blocks.size(); ++b) {
    const LmiBlock& lb = prob.blocks[b];
    if (lb.kind == BlockKind::Moment && tau_y.isZero(0.0)) {
      for (const auto& e : lb.entries)
        if (e.row == e.col) tau_y[static_cast<Index>(e.var)] += e.coef;
      r.moment_size = lb.size;
    }
    Block blk;
    blk.source = b;
    Index s = lb.size;
    blk.V = MatrixXd::Identity(s, s);
    blk.C = lb.evaluate(r.y0);
    MatrixXd stack = MatrixXd::Zero(s * s, k);
    for (const auto& e : lb.entries) {
      auto row = r.N.row(static_cast<Index>(e.var));
      stack.row(e.row + e.col * s) += e.coef * row;
      if (e.row != e.col) stack.row(e.col + e.row * s) += e.coef * row;
    }
    blk.G.resize(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j)
      blk.G[static_cast<std::size_t>(j)] = Eigen::Map<const MatrixXd>(stack.col(j).data(), s, s);
    remove_structural_kernel(blk);
    r.blocks.push_back(std::move(blk));
  }
  r.tau = r.N.transpose() * tau_y;
  r.tau0 = tau_y.dot(r.y0);
  return out;
}

// Moves to the affine subspace {z_p + N2 w} and restricts each block to W_b.
void change_variables(Reduced& r, const VectorXd& zp, const MatrixXd& N2,
                      const std::vector<MatrixXd>& W) {
  Index k2 = N2.cols();
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    Block& blk = r.blocks[b];
    const MatrixXd& Wb = W[b];
    MatrixXd C = blk.at(zp);
    std::vector<MatrixXd> G(static_cast<std::size_t>(k2));
    for (Index w = 0; w < k2; ++w) {
      MatrixXd g = MatrixXd::Zero(blk.C.rows(), blk.C.cols());
      for (std::size_t j = 0; j < blk.G.size(); ++j) {
        double a = N2(static_cast<Index>(j), w);
        if (a != 0.0) g.noalias() += a * blk.G[j];
      }
      G[static_cast<std::size_t>(w)] = Wb.transpose() * g * Wb;
    }
    blk.C = Wb.transpose() * C * Wb;
    blk.G = std::move(G);
    blk.V = blk.V * Wb;
    remove_structural_kernel(blk);
  }
  r.y0 = r.lift(zp);
  r.ell0 += r.ell.dot(zp);
  r.tau0 += r.tau.dot(zp);
  r.ell = N2.transpose() * r.ell;
  r.tau = N2.transpose() * r.tau;
  r.N = r.N * N2;
}

// ---------------------------------------------------------------------------
// Log-det barrier centering: minimize w.x - sum_b log det(C_b + sum_j x_j G_bj).

struct Family {
  std::vector<const MatrixXd*> C;
  std::vector<std::vector<const MatrixXd*>> G;  // per block, one per variable (nullptr = zero)
  Index dim = 0;
};

struct CenterResult {
  bool converged = false;
  bool failed = false;
  bool stopped = false;  // early exit requested by the caller
  int iterations = 0;
  double decrement = kInf;
};

class Centering {
 public:
  explicit Centering(const Family& fam) : fam_(fam) {}

  // Barrier value, +inf outside the cone.
  double barrier(const VectorXd& x) const {
    double v = 0.0;
    for (std::size_t b = 0; b < fam_.C.size(); ++b) {
      MatrixXd m = assemble(b, x);
      Eigen::LLT<MatrixXd> llt(m);
      if (llt.info() != Eigen::Success) return kInf;
      const auto& L = llt.matrixLLT();
      for (Index i = 0; i < m.rows(); ++i) {
        double d = L(i, i);
        if (!(d > 0.0)) return kInf;
        v -= 2.0 * std::log(d);
      }
    }
    return v;
  }

  template <class Stop>
  CenterResult run(const VectorXd& w, VectorXd& x, int max_iters, Stop&& stop) {
    CenterResult res;
    Index k = fam_.dim;
    double bar = barrier(x);
    if (!std::isfinite(bar)) {
      res.failed = true;
      return res;
    }
    int stalled = 0;
    for (int it = 0; it < max_iters; ++it) {
      ++res.iterations;
      VectorXd grad = w;
      MatrixXd H = MatrixXd::Zero(k, k);
      if (!derivatives(x, grad, H)) {
        res.failed = true;
        return res;
      }
      VectorXd dx;
      if (!newton_direction(H, grad, dx)) {
        res.failed = true;
        return res;
      }
      double lam2 = -grad.dot(dx);
      res.decrement = std::sqrt(std::max(lam2, 0.0));
      if (lam2 <= kNewtonTol) {
        res.converged = true;
        return res;
      }
      stalled = lam2 < kLooseNewtonTol ? stalled + 1 : 0;
      if (stalled >= kStallSteps) {
        res.converged = true;
        return res;
      }
      // Changes of the objective are accumulated as differences so that a
      // large linear term does not swamp them.
      const double wdx = w.dot(dx);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        VectorXd xn = x + alpha * dx;
        double bn = barrier(xn);
        if (std::isfinite(bn) && alpha * wdx + (bn - bar) <= -0.01 * alpha * lam2) {
          x = std::move(xn);
          bar = bn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) {
        // No representable decrease left: accept as centered when close.
        res.converged = lam2 < kLooseNewtonTol;
        res.failed = !res.converged;
        return res;
      }
      if (stop(x)) {
        res.stopped = true;
        return res;
      }
    }
    res.converged = res.decrement * res.decrement < kLooseNewtonTol;
    return res;
  }

  // Gradient of the barrier added to grad, Hessian added to H.
  bool derivatives(const VectorXd& x, VectorXd& grad, MatrixXd& H) const {
    Index k = fam_.dim;
    for (std::size_t b = 0; b < fam_.C.size(); ++b) {
      MatrixXd m = assemble(b, x);
      Index s = m.rows();
      Eigen::LLT<MatrixXd> llt(m);
      if (llt.info() != Eigen::Success) return false;
      auto L = llt.matrixL();
      std::vector<MatrixXd> P(static_cast<std::size_t>(k));
      std::vector<Index> active;
      for (Index j = 0; j < k; ++j) {
        const MatrixXd* g = fam_.G[b][static_cast<std::size_t>(j)];
        if (!g) continue;
        MatrixXd t = L.solve(*g);
        MatrixXd p = L.solve(t.transpose());
        grad[j] -= p.trace();
        P[static_cast<std::size_t>(j)] = std::move(p);
        active.push_back(j);
      }
      const std::size_t len = static_cast<std::size_t>(s * s);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const double* pa = P[static_cast<std::size_t>(active[a])].data();
        for (std::size_t c = a; c < active.size(); ++c) {
          double v = simd::dot(pa, P[static_cast<std::size_t>(active[c])].data(), len);
          H(active[a], active[c]) += v;
          if (c != a) H(active[c], active[a]) += v;
        }
      }
    }
    return true;
  }

  MatrixXd assemble(std::size_t b, const VectorXd& x) const {
    MatrixXd m = *fam_.C[b];
    for (Index j = 0; j < fam_.dim; ++j) {
      const MatrixXd* g = fam_.G[b][static_cast<std::size_t>(j)];
      if (g && x[j] != 0.0) m.noalias() += x[j] * *g;
    }
    return m;
  }

  static bool newton_direction(const MatrixXd& H, const VectorXd& grad, VectorXd& dx) {
    Index k = H.rows();
    if (k == 0) {
      dx.resize(0);
      return true;
    }
    // Symmetric diagonal scaling keeps the factorization usable when the
    // Hessian spans many orders of magnitude near the boundary.
    VectorXd d = H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
    VectorXd gs = d.cwiseProduct(grad);
    double reg = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
      MatrixXd M = Hs;
      if (reg > 0.0) M.diagonal().array() += reg;
      Eigen::LLT<MatrixXd> llt(M);
      if (llt.info() == Eigen::Success) {
        dx = -d.cwiseProduct(llt.solve(gs));
        if (dx.allFinite()) return true;
      }
      reg = reg == 0.0 ? 1e-12 : reg * 100.0;
    }
    return false;
  }

 private:
  const Family& fam_;
};

// Family for the reduced blocks acting on z.
Family make_family(const Reduced& r) {
  Family f;
  f.dim = r.k();
  for (const auto& blk : r.blocks) {
    if (blk.C.rows() == 0) continue;
    f.C.push_back(&blk.C);
    std::vector<const MatrixXd*> g;
    for (const auto& gj : blk.G) g.push_back(&gj);
    f.G.push_back(std::move(g));
  }
  return f;
}

double block_min_eig(const Reduced& r, const VectorXd& z) {
  double m = kInf;
  for (const auto& blk : r.blocks)
    if (blk.C.rows()) m = std::min(m, min_eigenvalue(blk.at(z)));
  return m;
}

// ---------------------------------------------------------------------------
// Phase 1 with face restriction.

struct Phase1Outcome {
  FeasibilityStatus status = FeasibilityStatus::NumericalFailure;
  VectorXd z;
  double t = 0.0;
  int iterations = 0;
};

void log_line(const SolverOptions& opts, int iter, double mu, double primal, double dual,
              double min_eig, double eq_res) {
  if (!opts.log) return;
  auto& os = *opts.log;
  os << iter << ' ' << mu << ' ' << primal << ' ' << dual << ' ' << min_eig << ' ' << eq_res
     << '\n';
}

// min t s.t. S_b(z) + t I >= 0 and t + 1 >= 0, by a barrier path.
Phase1Outcome run_phase1(const Reduced& r, const SolverOptions& opts) {
  Phase1Outcome out;
  Index k = r.k();
  out.z = VectorXd::Zero(k);
  double start_eig = block_min_eig(r, out.z);
  if (start_eig > opts.infeasibility_margin / 2) {
    out.status = FeasibilityStatus::StrictlyFeasible;
    out.t = -start_eig;
    return out;
  }

  // Variables x = (z, t).
  std::vector<MatrixXd> idents;
  Family fam;
  fam.dim = k + 1;
  for (const auto& blk : r.blocks) {
    if (blk.C.rows() == 0) continue;
    idents.push_back(MatrixXd::Identity(blk.C.rows(), blk.C.rows()));
  }
  std::size_t bi = 0;
  for (const auto& blk : r.blocks) {
    if (blk.C.rows() == 0) continue;
    fam.C.push_back(&blk.C);
    std::vector<const MatrixXd*> g;
    for (const auto& gj : blk.G) g.push_back(&gj);
    g.push_back(&idents[bi++]);
    fam.G.push_back(std::move(g));
  }
  const double bound = 1.0;
  MatrixXd bound_c = MatrixXd::Constant(1, 1, bound);
  MatrixXd bound_g = MatrixXd::Constant(1, 1, 1.0);
  fam.C.push_back(&bound_c);
  std::vector<const MatrixXd*> gb(static_cast<std::size_t>(k), nullptr);
  gb.push_back(&bound_g);
  fam.G.push_back(std::move(gb));

  VectorXd x = VectorXd::Zero(k + 1);
  x[k] = std::max(0.0, -start_eig) + 1.0;
  Centering engine(fam);
  const double nsum = static_cast<double>(r.barrier_size() + 1);
  const double penalty = opts.trace_penalty;
  const double mu_floor = 1e-3 * opts.infeasibility_margin / nsum;
  double mu = 1.0;
  auto stop = [&](const VectorXd& xv) { return xv[k] < -opts.infeasibility_margin / 2; };
  int outer = 0;
  while (true) {
    VectorXd w = VectorXd::Zero(k + 1);
    w.head(k) = penalty * r.tau;
    // Trace of the moment block shifted by t, so that t cannot trade
    // against the penalty.
    w[k] = 1.0 / mu + penalty * r.moment_size;
    CenterResult cr = engine.run(w, x, opts.max_newton_iters, stop);
    out.iterations += cr.iterations;
    out.z = x.head(k);
    out.t = x[k];
    log_line(opts, outer, mu, x[k], x[k] - mu * nsum, -x[k], 0.0);
    ++outer;
    if (cr.stopped || x[k] < -opts.infeasibility_margin / 2) {
      out.status = FeasibilityStatus::StrictlyFeasible;
      return out;
    }
    if (cr.failed) {
      out.status = FeasibilityStatus::NumericalFailure;
      return out;
    }
    if (x[k] - mu * nsum > opts.infeasibility_margin) {
      out.status = FeasibilityStatus::Infeasible;
      return out;
    }
    if (mu <= mu_floor) {
      out.status = FeasibilityStatus::Ambiguous;
      return out;
    }
    mu = std::max(mu * opts.barrier_decrease, mu_floor);
  }
}

// Position of the first eigenvalue gap among the eigenvalues below
// kKernelCeiling * ref, or 0 when there is none.
Index first_gap(const VectorXd& eig, double ref) {
  for (Index i = 1; i < eig.size(); ++i) {
    if (eig[i - 1] > kKernelCeiling * ref) break;
    if (eig[i] >= kKernelGap * std::max(eig[i - 1], 1e-300 * ref)) return i;
  }
  return 0;
}

// Kernel directions of a nearly singular PSD matrix, cut at the first
// eigenvalue gap below kKernelCeiling * lambda_max. A block that is tiny
// next to the largest eigenvalue of any block (`scale`) is cut at its first
// gap on that scale, and is all kernel when it has none.
Index forced_kernel_size(const VectorXd& eig, double scale) {
  Index s = eig.size();
  if (s == 0) return 0;
  double top = std::max(eig[s - 1], 1e-300);
  // The first clear gap: removing more could cut off directions that are only
  // small because the atoms carrying them have small weight.
  if (Index q = first_gap(eig, top)) return q;
  if (top <= kKernelCeiling * scale && scale >= kKernelGap * top) {
    Index q = first_gap(eig, scale);
    return q ? q : s;
  }
  return 0;
}

// Restricts the problem to the face where the nearly singular directions of
// the phase-1 limit vanish. Returns false when nothing can be restricted.
bool restrict_to_face(Reduced& r, const VectorXd& z, double t) {
  Index k = r.k();
  std::vector<MatrixXd> W(r.blocks.size());
  MatrixXd E(0, k);
  VectorXd e(0);
  bool any = false;
  std::vector<Eigen::SelfAdjointEigenSolver<MatrixXd>> eig(r.blocks.size());
  double scale = 0.0, coef_scale = 0.0;
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    if (r.blocks[b].C.rows() == 0) continue;
    for (const auto& g : r.blocks[b].G) coef_scale = std::max(coef_scale, g.norm());
    MatrixXd m = r.blocks[b].at(z);
    m.diagonal().array() += std::max(t, 0.0);
    eig[b].compute(m);
    scale = std::max(scale, eig[b].eigenvalues().maxCoeff());
  }
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    const Block& blk = r.blocks[b];
    Index s = blk.C.rows();
    if (s == 0) {
      W[b] = MatrixXd::Identity(0, 0);
      continue;
    }
    const auto& es = eig[b];
    Index q = forced_kernel_size(es.eigenvalues(), scale);
    W[b] = es.eigenvectors().rightCols(s - q);
    if (q == 0) continue;
    any = true;
    MatrixXd U = es.eigenvectors().leftCols(q);
    // (C + sum_j z_j G_j) U = 0, expressed in the eigenbasis.
    MatrixXd Q = es.eigenvectors();
    Index rows = s * q;
    Index base = E.rows();
    E.conservativeResize(base + rows, k);
    e.conservativeResize(base + rows);
    MatrixXd cu = Q.transpose() * blk.C * U;
    e.segment(base, rows) = -Eigen::Map<const VectorXd>(cu.data(), rows);
    for (Index j = 0; j < k; ++j) {
      MatrixXd gu = Q.transpose() * blk.G[static_cast<std::size_t>(j)] * U;
      E.col(j).segment(base, rows) = Eigen::Map<const VectorXd>(gu.data(), rows);
    }
  }
  if (!any) return false;
  // A block whose entries are all tiny next to the others gives face
  // equations of the same tiny size; they carry no information and must not
  // pin the remaining variables.
  AffineSpace as = solve_affine(E, e, z, kFaceEquationTol, coef_scale);
  change_variables(r, as.point, as.null, W);
  ++r.facial_reductions;
  return true;
}

Phase1Outcome feasible_start(Reduced& r, const SolverOptions& opts) {
  Phase1Outcome last;
  int total = 0;
  for (int round = 0; round <= kMaxFacialReductions; ++round) {
    last = run_phase1(r, opts);
    total += last.iterations;
    last.iterations = total;
    if (last.status != FeasibilityStatus::Ambiguous) return last;
    if (round == kMaxFacialReductions || !restrict_to_face(r, last.z, last.t)) return last;
  }
  return last;
}

// ---------------------------------------------------------------------------
// Reporting helpers.

double original_min_eig(const SdpProblem& prob, const VectorXd& y) {
  double m = kInf;
  for (const auto& b : prob.blocks) m = std::min(m, min_eigenvalue(b.evaluate(y)));
  return m;
}

double equality_residual(const SdpProblem& prob, const VectorXd& y) {
  if (prob.A.rows() == 0) return 0.0;
  return (prob.A * y - prob.b).cwiseAbs().maxCoeff();
}

// F_b^*(Z): coefficient of y_i in <Z, F_b(y)>.
void add_adjoint(const LmiBlock& blk, const MatrixXd& Z, VectorXd& out) {
  for (const auto& e : blk.entries) {
    double v = e.row == e.col ? Z(e.row, e.col) : Z(e.row, e.col) + Z(e.col, e.row);
    out[static_cast<Index>(e.var)] += e.coef * v;
  }
}

// Dual blocks mu (M^-1 - M^-1 dM M^-1) for the Newton direction dz at z:
// the first-order correction makes the dual equality hold to Newton accuracy.
void fill_duals(const SdpProblem& prob, const Reduced& r, const VectorXd& z, const VectorXd& dz,
                double mu, SolveResult& res) {
  res.dual_blocks.assign(prob.blocks.size(), MatrixXd());
  VectorXd resid = prob.c;
  for (const auto& blk : r.blocks) {
    const LmiBlock& lb = prob.blocks[blk.source];
    MatrixXd Z = MatrixXd::Zero(lb.size, lb.size);
    if (blk.C.rows()) {
      Index s = blk.C.rows();
      MatrixXd inv = blk.at(z).ldlt().solve(MatrixXd::Identity(s, s));
      MatrixXd dm = MatrixXd::Zero(s, s);
      for (std::size_t j = 0; j < blk.G.size() && static_cast<Index>(j) < dz.size(); ++j)
        dm.noalias() += dz[static_cast<Index>(j)] * blk.G[j];
      MatrixXd zr = inv - inv * dm * inv;
      Z = mu * blk.V * zr * blk.V.transpose();
      Z = 0.5 * (Z + Z.transpose()).eval();
    }
    VectorXd adj = VectorXd::Zero(resid.size());
    add_adjoint(lb, Z, adj);
    resid -= adj;
    res.dual_blocks[blk.source] = std::move(Z);
  }
  if (prob.A.rows()) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(prob.A.transpose());
    cod.setThreshold(kEqualityTol);
    res.multipliers = cod.solve(resid);
    res.dual_objective = prob.b.dot(res.multipliers);
    res.dual_residual = (prob.A.transpose() * res.multipliers - resid).norm();
  } else {
    res.multipliers.resize(0);
    res.dual_objective = 0.0;
    res.dual_residual = resid.norm();
  }
}

// c.y = b.m + <Z, F(y) - F_0> + r.y for the dual residual r, so c.y - <Z, F(y)>
// is the dual objective b.m - <Z, F_0> with the residual accounted for at y.
// It stays below c.y whenever Z and F(y) are PSD. The candidate with the
// smallest complementarity <Z, F(y)> is reported.
void pick_duals(const SdpProblem& prob, const VectorXd& y, std::vector<SolveResult>& candidates,
                SolveResult& res) {
  std::vector<MatrixXd> F;
  for (const auto& b : prob.blocks) F.push_back(b.evaluate(y));
  double best = kInf;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double comp = 0.0;
    for (std::size_t b = 0; b < F.size(); ++b)
      if (candidates[i].dual_blocks[b].size()) comp += candidates[i].dual_blocks[b].cwiseProduct(F[b]).sum();
    if (comp < best) {
      best = comp;
      pick = i;
    }
  }
  SolveResult& c = candidates[pick];
  res.dual_blocks = std::move(c.dual_blocks);
  res.multipliers = std::move(c.multipliers);
  res.dual_residual = c.dual_residual;
  res.dual_objective = prob.c.dot(y) - best;
}


}  // namespace

// ---------------------------------------------------------------------------

Phase1Result phase1(const SdpProblem& problem, const SolverOptions& opts) {
  opts.validate();
  Phase1Result out;
  ReduceOutcome ro = reduce(problem);
  if (!ro.consistent) {
    out.status = FeasibilityStatus::Infeasible;
    out.margin = kInf;
    return out;
  }
  Reduced& r = ro.reduced;
  Phase1Outcome p = feasible_start(r, opts);
  out.status = p.status;
  out.margin = p.t;
  out.iterations = p.iterations;
  out.y = r.lift(p.z);
  return out;
}

SolveResult solve(const SdpProblem& problem, const SolverOptions& opts) {
  opts.validate();
  SolveResult res;
  ReduceOutcome ro = reduce(problem);
  if (!ro.consistent) {
    res.status = SolveStatus::Infeasible;
    res.message = "equality constraints are inconsistent";
    return res;
  }
  Reduced& r = ro.reduced;
  Phase1Outcome p = feasible_start(r, opts);
  res.iterations = p.iterations;
  res.phase1_value = p.t;
  res.facial_reductions = r.facial_reductions;
  if (p.status != FeasibilityStatus::StrictlyFeasible) {
    res.status = p.status == FeasibilityStatus::Infeasible ? SolveStatus::Infeasible
                                                          : SolveStatus::NumericalFailure;
    res.message = std::string("phase 1: ") + to_string(p.status);
    res.y = r.lift(p.z);
    res.objective = problem.c.dot(res.y);
    return res;
  }

  Family fam = make_family(r);
  Centering engine(fam);
  VectorXd z = p.z;
  auto never = [](const VectorXd&) { return false; };
  const double penalty = opts.trace_penalty;
  const double nsum = static_cast<double>(r.barrier_size());

  CenterResult cr = engine.run(penalty * r.tau, z, opts.max_newton_iters, never);
  res.iterations += cr.iterations;
  if (cr.failed) {
    res.status = SolveStatus::NumericalFailure;
    res.message = "analytic centering failed";
  }
  const double trace_start = r.tau0 + r.tau.dot(z);

  double mu = 1.0;
  if (r.ell.norm() > 0.0 && !cr.failed) {
    VectorXd grad = VectorXd::Zero(r.k());
    MatrixXd H = MatrixXd::Zero(r.k(), r.k());
    VectorXd dx;
    if (engine.derivatives(z, grad, H) && Centering::newton_direction(H, -r.ell, dx))
      mu = std::max(std::sqrt(std::max(r.ell.dot(dx), 0.0)), 1e-6);
  }

  // Duals are read at every centered point; the final choice is made against
  // the last primal point (see pick_duals). Early on the trace penalty spoils
  // the dual equations, late the conditioning of nearly singular blocks does.
  std::vector<SolveResult> candidates;
  auto record_duals = [&](double at_mu) {
    VectorXd grad = r.ell / at_mu + penalty * r.tau;
    MatrixXd H = MatrixXd::Zero(r.k(), r.k());
    VectorXd step = VectorXd::Zero(r.k());
    if (!engine.derivatives(z, grad, H) || !Centering::newton_direction(H, grad, step)) return;
    SolveResult cand;
    fill_duals(problem, r, z, step, at_mu, cand);
    if (std::isfinite(cand.dual_objective)) candidates.push_back(std::move(cand));
  };

  SolveStatus status = cr.failed ? SolveStatus::NumericalFailure : SolveStatus::Optimal;
  int outer = 0;
  if (!cr.failed && r.ell.norm() > 0.0) {
    status = SolveStatus::MaxIterations;
    for (;;) {
      VectorXd w = r.ell / mu + penalty * r.tau;
      VectorXd zprev = z;
      cr = engine.run(w, z, opts.max_newton_iters, never);
      res.iterations += cr.iterations;
      double primal = r.ell0 + r.ell.dot(z);
      double trace = r.tau0 + r.tau.dot(z);
      log_line(opts, outer++, mu, primal, primal - mu * nsum, block_min_eig(r, z), 0.0);
      if (cr.failed) {
        z = zprev;
        status = SolveStatus::NumericalFailure;
        res.message = "centering failed";
        break;
      }
      if (!cr.converged) {
        // A centering that keeps decreasing while the moments grow is
        // following a recession curve of the objective. Such curves need not
        // contain a ray (the level sets can be parabolic), so growth of the
        // trace is the evidence: a jump, or a doubling far from the start.
        double prev_trace = r.tau0 + r.tau.dot(zprev);
        double prev_primal = r.ell0 + r.ell.dot(zprev);
        bool jump = trace > 5.0 * std::max(1.0, prev_trace);
        bool runaway = trace > 2.0 * prev_trace && trace > 100.0 * (1.0 + std::abs(trace_start));
        if ((jump || runaway) && primal < prev_primal) {
          status = SolveStatus::Unbounded;
          res.message = "objective decreases along a diverging moment sequence";
        } else {
          status = SolveStatus::MaxIterations;
          res.message = "centering did not converge";
        }
        break;
      }
      record_duals(mu);
      if (trace > opts.divergence_trace * (1.0 + std::abs(trace_start))) {
        status = SolveStatus::Unbounded;
        res.message = "moment trace diverges along the central path";
        break;
      }
      if (mu * (nsum + penalty * std::abs(trace)) <= opts.gap_tol) {
        status = SolveStatus::Optimal;
        break;
      }
      mu *= opts.barrier_decrease;
    }
  } else {
    mu = 0.0;
  }

  res.status = status;
  res.y = r.lift(z);
  res.objective = problem.c.dot(res.y);
  res.gap = mu * nsum;
  if (status == SolveStatus::Optimal && !candidates.empty()) {
    pick_duals(problem, res.y, candidates, res);
  } else {
    VectorXd dz = VectorXd::Zero(r.k());
    if (mu > 0.0) {
      VectorXd grad = r.ell / mu + penalty * r.tau;
      MatrixXd H = MatrixXd::Zero(r.k(), r.k());
      VectorXd step;
      if (engine.derivatives(z, grad, H) && Centering::newton_direction(H, grad, step)) dz = step;
    }
    fill_duals(problem, r, z, dz, mu, res);
  }
  if (r.ell.norm() == 0.0) res.dual_objective = res.objective;
  res.min_eig = original_min_eig(problem, res.y);
  res.eq_residual = equality_residual(problem, res.y);
  return res;
}

GenericPoint generic_point(const SdpProblem& problem, const SolverOptions& opts) {
  opts.validate();
  GenericPoint gp;
  ReduceOutcome ro = reduce(problem);
  if (!ro.consistent) {
    gp.status = SolveStatus::Infeasible;
    gp.message = "equality constraints are inconsistent";
    return gp;
  }
  Reduced& r = ro.reduced;
  Phase1Outcome p = feasible_start(r, opts);
  gp.iterations = p.iterations;
  gp.facial_reductions = r.facial_reductions;
  VectorXd z = p.z;
  if (p.status == FeasibilityStatus::StrictlyFeasible) {
    Family fam = make_family(r);
    Centering engine(fam);
    auto never = [](const VectorXd&) { return false; };
    CenterResult cr = engine.run(opts.trace_penalty * r.tau, z, opts.max_newton_iters, never);
    gp.iterations += cr.iterations;
    if (cr.converged) {
      gp.status = SolveStatus::Optimal;
    } else {
      gp.status = cr.failed ? SolveStatus::NumericalFailure : SolveStatus::MaxIterations;
      gp.message = "analytic centering did not converge";
    }
  } else if (p.status == FeasibilityStatus::Infeasible) {
    gp.status = SolveStatus::Infeasible;
    gp.message = "phase 1 certifies infeasibility";
  } else {
    gp.status = SolveStatus::NumericalFailure;
    gp.message = std::string("phase 1: ") + to_string(p.status);
  }
  VectorXd y = r.lift(z);
  gp.sigma = MomentVector(problem.nvars, 2 * problem.order, y);
  gp.min_eig = original_min_eig(problem, y);
  gp.eq_residual = equality_residual(problem, y);
  for (const auto& b : problem.blocks) {
    MatrixXd m = b.evaluate(y);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    VectorXd sv = es.eigenvalues().cwiseAbs();
    gp.block_ranks.push_back(numerical_rank(sv, default_rank_tol(m.rows(), m.cols())));
  }
  return gp;
}

SosCertificate sos_certificate(const SolveResult& result, const SdpProblem& problem,
                               double residual_limit) {
  SosCertificate cert;
  cert.lambda = result.dual_objective;
  std::size_t n = problem.nvars;
  Polynomial rem = problem.objective;
  for (std::size_t r = 0; r < problem.equality_polys.size(); ++r) {
    double mu = r < static_cast<std::size_t>(result.multipliers.size())
                    ? result.multipliers[static_cast<Index>(r)]
                    : 0.0;
    rem -= mu * problem.equality_polys[r];
  }
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    const LmiBlock& lb = problem.blocks[b];
    std::vector<Polynomial> squares;
    if (b < result.dual_blocks.size() && result.dual_blocks[b].size()) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(result.dual_blocks[b]);
      auto rows = MonomialBasis::get(n, lb.degree);
      Polynomial sum(n);
      for (Index j = 0; j < es.eigenvalues().size(); ++j) {
        double ev = es.eigenvalues()[j];
        if (ev <= 0.0) continue;
        double scale = std::sqrt(ev);
        Polynomial q(n);
        for (Index i = 0; i < es.eigenvectors().rows(); ++i) {
          double c = scale * es.eigenvectors()(i, j);
          if (c != 0.0) q += Polynomial::monomial((*rows)[static_cast<std::size_t>(i)], c);
        }
        sum += q * q;
        squares.push_back(std::move(q));
      }
      rem -= lb.generator * sum;
    }
    cert.squares.push_back(std::move(squares));
  }
  double worst = 0.0;
  for (const auto& [m, c] : rem.terms()) worst = std::max(worst, std::abs(c));
  cert.residual = worst;
  cert.residual_too_large = worst > residual_limit;
  return cert;
}

}  // namespace momopt
