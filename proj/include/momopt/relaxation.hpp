#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <vector>

#include "momopt/moments.hpp"
#include "momopt/polyparse.hpp"
#include "momopt/polyring.hpp"

namespace momopt {

/// inf f(x) subject to g_i(x) >= 0 and h_j(x) = 0.
struct POPInstance {
  Polynomial f;
  std::vector<Polynomial> ineqs;
  std::vector<Polynomial> eqs;
  VariableTable vars;

  std::size_t nvars() const noexcept { return f.nvars(); }
  /// Largest degree among f, g and h.
  int max_degree() const;
  /// Throws LengthMismatch when the polynomials disagree on the variable count.
  void validate() const;
};

enum class RelaxationMode { QuadraticModule, Preordering };

enum class BlockKind { Moment, Localizing };

/// One term of an affine matrix map: entry (row, col) and (col, row) gain
/// coef * y[var].
struct LmiEntry {
  int row;
  int col;
  std::size_t var;
  double coef;
};

/// F(y) = constant + sum_i y_i F_i, required to be positive semidefinite.
struct LmiBlock {
  BlockKind kind = BlockKind::Moment;
  Polynomial generator;  // 1 for the moment matrix
  int degree = 0;        // rows indexed by monomials of degree <= degree
  int size = 0;
  Eigen::MatrixXd constant;  // empty means zero
  std::vector<LmiEntry> entries;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

/// min c.y subject to A y = b and every block PSD. Variables are the moments
/// y_alpha, |alpha| <= 2 * order, in graded-lex order.
struct SdpProblem {
  std::size_t nvars = 0;  // polynomial variables
  int order = 0;
  RelaxationMode mode = RelaxationMode::QuadraticModule;
  std::shared_ptr<const MonomialBasis> basis;

  std::vector<LmiBlock> blocks;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  /// Polynomial p_r whose pairing with sigma is row r of A.
  std::vector<Polynomial> equality_polys;
  Eigen::VectorXd c;
  Polynomial objective;

  std::size_t num_vars() const { return static_cast<std::size_t>(c.size()); }
  std::size_t num_equalities() const { return static_cast<std::size_t>(A.rows()); }
  void add_equality(const Polynomial& p, double rhs);
};

SdpProblem build_mom_relaxation(const POPInstance& pop, int d,
                                RelaxationMode mode = RelaxationMode::QuadraticModule);

inline constexpr std::size_t kMaxPreorderingGenerators = 6;

/// Products over all nonempty subsets, duplicates removed.
std::vector<Polynomial> expand_preordering(const std::vector<Polynomial>& g);

/// Adds <sigma, X^gamma (f - v)> = 0 for |gamma| + deg f <= 2 * order and
/// clears the objective.
SdpProblem add_level_constraint(const SdpProblem& problem, const Polynomial& f, double v);

/// Smallest admissible order ceil(max degree / 2), at least 1.
int minimal_order(const POPInstance& pop);

}  // namespace momopt
