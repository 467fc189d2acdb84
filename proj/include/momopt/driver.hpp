#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "momopt/extract.hpp"
#include "momopt/moments.hpp"
#include "momopt/polar.hpp"
#include "momopt/relaxation.hpp"
#include "momopt/sdpsolve.hpp"

namespace momopt {

enum class RunStatus { Exact, MaxOrderReached, Infeasible };

const char* to_string(RunStatus s);

struct RunConfig {
  /// 0 selects ceil(deg / 2).
  int initial_order = 0;
  /// 0 selects initial_order + 4.
  int max_order = 0;
  RelaxationMode mode = RelaxationMode::QuadraticModule;
  double residual_tol = 1e-2;
  SolverOptions solver;
  std::uint64_t seed = 42;
  /// Relative width at which the level bisection stops.
  double level_tol = 1e-7;
  PolarCaps caps;

  /// Throws OrderTooSmall or InvalidArgument.
  void validate(const POPInstance& pop) const;
  int first_order(const POPInstance& pop) const;
  int last_order(const POPInstance& pop) const;
};

/// What happened at one relaxation order.
struct OrderTrace {
  int order = 0;
  /// Index into PolarSystem::branches, -1 outside branch mode.
  int branch = -1;
  SolveStatus solve_status = SolveStatus::NumericalFailure;
  /// -inf when the relaxation is unbounded, NaN when it was not solved.
  double v_mom = 0.0;
  double v_sos = 0.0;
  double gap = 0.0;
  /// Level used for the generic point and whether bisection produced it.
  double level = 0.0;
  bool level_searched = false;
  SolveStatus generic_status = SolveStatus::NumericalFailure;
  bool extracted = false;
  ExtractionFailure extraction_failure = ExtractionFailure::None;
  std::vector<std::size_t> ranks;
  double residual = 0.0;
  double solve_ms = 0.0;
  double generic_ms = 0.0;
  double extract_ms = 0.0;
  std::string message;
};

struct RunReport {
  RunStatus status = RunStatus::MaxOrderReached;
  double f_star = 0.0;
  ExtractedMeasure minimizers;
  std::vector<OrderTrace> trace;
  double total_ms = 0.0;
  std::string message;
};

struct MinimizeResult {
  SolveResult solve;
  /// f*_MoM,d (objective of the solve).
  double v = 0.0;
  MomentVector sigma;
  OrderTrace trace;
  /// Direct extraction attempt on the optimal moments.
  ExtractionResult extraction;
};

/// One relaxation of order d.
MinimizeResult minimize(const POPInstance& pop, int d, const RunConfig& cfg = {});

/// Raises the order until a generic point of the level-constrained relaxation
/// yields an atomic measure.
RunReport finite_minimizers(const POPInstance& pop, const RunConfig& cfg = {});

/// finite_minimizers on the problem augmented with polar generators or the
/// KKT system, starting at order d. Branch mode returns the branch with the
/// smallest value.
RunReport polar_minimize(const POPInstance& pop, int d, PolarMode mode, const RunConfig& cfg = {});

}  // namespace momopt
