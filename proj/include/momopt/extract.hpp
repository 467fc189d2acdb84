#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "momopt/moments.hpp"

namespace momopt {

/// Weighted point set sum_i w_i e_{xi_i}.
struct ExtractedMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  /// max over |alpha| <= 2 * degree_used of |sigma_alpha - sum_i w_i xi_i^alpha|;
  /// the top degree is excluded when the extraction was not flat.
  double residual = 0.0;
  int degree_used = 0;
  std::size_t rank = 0;
  bool flat = false;
};

enum class ExtractionFailure { None, NoFlatness, ComplexPoints, ResidualTooLarge };

const char* to_string(ExtractionFailure f);

struct ExtractOptions {
  /// Relative rank threshold; non-positive selects default_rank_tol per matrix.
  double rank_tol = 0.0;
  double residual_tol = 1e-2;
  std::uint64_t seed = 42;
};

struct ExtractionResult {
  bool ok = false;
  ExtractionFailure failure = ExtractionFailure::None;
  ExtractedMeasure measure;
  /// Numerical ranks of H^0 .. H^k.
  std::vector<std::size_t> ranks;
  /// Singular values of H^t for the degree t that was tried last.
  Eigen::VectorXd singular_values;
  double residual = 0.0;
};

ExtractionResult extract_measure(const MomentVector& sigma, const ExtractOptions& opts = {});

/// Recomputes the reconstruction residual over |alpha| <= 2 * m.degree_used
/// (2 * m.degree_used - 1 when m.flat is false), capped at sigma's degree.
double verify_measure(const MomentVector& sigma, const ExtractedMeasure& m);

}  // namespace momopt
