#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "momopt/polyring.hpp"

namespace momopt {

/// Graded-lex monomial list of degree <= d with constant-time index lookup.
class MonomialBasis {
 public:
  MonomialBasis(std::size_t n, int d);

  /// Shared instance for (n, d); bases are immutable, so sharing is safe.
  static std::shared_ptr<const MonomialBasis> get(std::size_t n, int d);

  std::size_t nvars() const noexcept { return n_; }
  int max_degree() const noexcept { return d_; }
  std::size_t size() const noexcept { return monos_.size(); }
  const Monomial& operator[](std::size_t i) const { return monos_[i]; }
  const std::vector<Monomial>& monomials() const noexcept { return monos_; }
  /// Number of leading entries with degree <= t.
  std::size_t prefix(int t) const { return monomial_count(n_, t < d_ ? t : d_); }
  std::optional<std::size_t> find(const Monomial& m) const;
  std::size_t index(const Monomial& m) const;

 private:
  std::size_t n_;
  int d_;
  std::vector<Monomial> monos_;
  std::unordered_map<Monomial, std::size_t, MonomialHash> index_;
};

/// Truncated pseudo-moment sequence sigma_alpha, |alpha| <= max_degree,
/// stored densely in graded-lex order.
class MomentVector {
 public:
  MomentVector() = default;
  MomentVector(std::size_t n, int max_degree);
  MomentVector(std::size_t n, int max_degree, Eigen::VectorXd values);

  std::size_t nvars() const noexcept { return basis_ ? basis_->nvars() : 0; }
  int max_degree() const noexcept { return basis_ ? basis_->max_degree() : -1; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const MonomialBasis& basis() const { return *basis_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double at(const Monomial& m) const;
  /// Restriction to moments of degree <= t.
  MomentVector truncated(int t) const;

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  Eigen::VectorXd values_;
};

/// Symmetric matrix indexed by the monomials of degree <= t on both sides.
struct HankelMatrix {
  int degree = 0;
  std::shared_ptr<const MonomialBasis> basis;  // rows and columns, degree <= `degree`
  Eigen::MatrixXd entries;

  Eigen::Index dim() const { return entries.rows(); }
};

struct KernelBasis {
  std::vector<Polynomial> polynomials;
  /// Orthonormal coefficient vectors, one column per kernel polynomial.
  Eigen::MatrixXd vectors;
  double tolerance = 0.0;
  /// Singular values of the source matrix, descending.
  Eigen::VectorXd singular_values;
  std::size_t rank = 0;
};

HankelMatrix hankel_matrix(const MomentVector& sigma, int t);
/// Entries sum_gamma g_gamma sigma_{alpha+beta+gamma}.
HankelMatrix localizing_matrix(const MomentVector& sigma, const Polynomial& g, int t);
/// The functional g * sigma : p -> <sigma, g p>, truncated at max_degree - deg g.
MomentVector convolve(const Polynomial& g, const MomentVector& sigma);

/// Default relative rank threshold: max(rows, cols) * 1e-8.
double default_rank_tol(Eigen::Index rows, Eigen::Index cols);
/// Singular values above rank_tol * sigma_max count toward the rank.
std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rank_tol);
KernelBasis kernel_basis(const HankelMatrix& h, double rank_tol);

MomentVector moments_of_points(const std::vector<std::vector<double>>& points,
                               const std::vector<double>& weights, int max_degree);
double apply(const MomentVector& sigma, const Polynomial& p);

/// Monomial power x^alpha evaluated at a point.
double monomial_value(const Monomial& m, std::span<const double> x);

}  // namespace momopt
