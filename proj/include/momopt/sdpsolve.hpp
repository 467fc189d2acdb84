#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "momopt/moments.hpp"
#include "momopt/relaxation.hpp"

namespace momopt {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  /// Cap on Newton steps per centering.
  int max_newton_iters = 200;
  double barrier_decrease = 0.2;
  double infeasibility_margin = 1e-8;
  /// Weight of the moment-matrix trace added to the barrier. Keeps the
  /// centering problems bounded when the feasible set has recession directions.
  double trace_penalty = 1.0;
  /// Moment trace beyond which the objective is declared unbounded below.
  double divergence_trace = 1e8;
  /// Optional iteration log: iter mu primal_obj dual_obj min_eig eq_residual.
  std::ostream* log = nullptr;

  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd y;
  double objective = 0.0;
  double dual_objective = 0.0;
  /// Dual matrices, one per problem block, in the block's monomial indexing.
  std::vector<Eigen::MatrixXd> dual_blocks;
  /// Multipliers of the equality rows of the problem.
  Eigen::VectorXd multipliers;
  double gap = 0.0;
  int iterations = 0;
  /// Smallest eigenvalue over the blocks at y and max |A y - b|.
  double min_eig = 0.0;
  double eq_residual = 0.0;
  /// Norm of the residual in the dual equality constraints.
  double dual_residual = 0.0;
  /// Final phase-1 value t (negative when strictly feasible).
  double phase1_value = 0.0;
  /// Number of face restrictions applied because the feasible set has no interior.
  int facial_reductions = 0;
  std::string message;
};

enum class FeasibilityStatus { StrictlyFeasible, Infeasible, Ambiguous, NumericalFailure };

const char* to_string(FeasibilityStatus s);

struct Phase1Result {
  FeasibilityStatus status = FeasibilityStatus::NumericalFailure;
  Eigen::VectorXd y;
  /// Optimal or final value of t in F_b(y) + t I >= 0.
  double margin = 0.0;
  int iterations = 0;
};

struct GenericPoint {
  SolveStatus status = SolveStatus::NumericalFailure;
  MomentVector sigma;
  /// Ranks of each block at the returned point (relative tolerance 1e-8 * size).
  std::vector<std::size_t> block_ranks;
  double min_eig = 0.0;
  double eq_residual = 0.0;
  int facial_reductions = 0;
  int iterations = 0;
  std::string message;
};

struct SosCertificate {
  double lambda = 0.0;
  /// Squares attached to each block's generator.
  std::vector<std::vector<Polynomial>> squares;
  /// Max coefficient of f - lambda - sum g_b s_b - sum_r mu_r p_r.
  double residual = 0.0;
  bool residual_too_large = false;
};

/// Minimizes c.y over the relaxation.
SolveResult solve(const SdpProblem& problem, const SolverOptions& opts = {});

/// Strict feasibility test: min t subject to F_b(y) + t I >= 0, A y = b, on
/// the affine hull after exact structural kernels are removed. The trace
/// penalty also enters here, so Infeasible means no strictly feasible point of
/// moderate moment trace exists.
Phase1Result phase1(const SdpProblem& problem, const SolverOptions& opts = {});

/// Penalized analytic center of the feasible set, computed after restricting
/// to the smallest face that contains it. Interior points of that face have
/// maximal block ranks.
GenericPoint generic_point(const SdpProblem& problem, const SolverOptions& opts = {});

SosCertificate sos_certificate(const SolveResult& result, const SdpProblem& problem,
                               double residual_limit = 1e-5);

}  // namespace momopt
