#pragma once

#include <cstddef>
#include <vector>

#include "momopt/polyparse.hpp"
#include "momopt/polyring.hpp"
#include "momopt/relaxation.hpp"

namespace momopt {

enum class PolarMode { KKT, PolarProduct, PolarBranch };

const char* to_string(PolarMode m);

struct PolarCaps {
  std::size_t max_ineq = 3;
  std::size_t max_gens = 5000;
};

/// One active subset A: equalities h, g_a (a in A) and the Jacobian minors;
/// the inequalities not in A stay as inequalities.
struct PolarBranchSystem {
  std::vector<std::size_t> active;
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;
};

struct PolarSystem {
  PolarMode mode = PolarMode::PolarProduct;
  /// KKT: stationarity, complementarity and h in the extended ring.
  /// PolarProduct: h followed by the product generators.
  std::vector<Polynomial> generators;
  /// Inequalities to keep next to the generators (extended for KKT).
  std::vector<Polynomial> inequalities;
  /// Variable table of the generators: X, then Lambda_k, Gamma_j for KKT.
  VariableTable vars;
  std::vector<PolarBranchSystem> branches;
};

/// df/dX_i - sum_k L_k^2 dg_k/dX_i - sum_j G_j dh_j/dX_i, L_k g_k and h_j,
/// with the multipliers appended as variables lambda_k and gamma_j.
PolarSystem kkt_system(const POPInstance& pop);

/// Generators of the polar ideal, either as products over the active subsets
/// or as one system per subset. Throws CapExceeded when the product form has
/// more than caps.max_ineq inequalities or caps.max_gens generators.
PolarSystem polar_generators(const POPInstance& pop, PolarMode mode, const PolarCaps& caps = {});

/// Rows are the gradients of `polys`.
std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& polys);

/// All l x l minors, rows and columns taken in lexicographic subset order.
std::vector<Polynomial> minors(const std::vector<std::vector<Polynomial>>& matrix, std::size_t l);

/// C(m, l) * C(n, l).
std::size_t minor_count(std::size_t m, std::size_t n, std::size_t l);

/// The problem with the polar generators (or the KKT system) added as
/// equalities. Not valid for PolarBranch; use the branch systems instead.
POPInstance augmented_problem(const POPInstance& pop, const PolarSystem& sys);

}  // namespace momopt
