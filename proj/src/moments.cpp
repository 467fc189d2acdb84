#include "momopt/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "momopt/error.hpp"

namespace momopt {

MonomialBasis::MonomialBasis(std::size_t n, int d) : n_(n), d_(d), monos_(monomials_up_to(n, d)) {
  index_.reserve(monos_.size());
  for (std::size_t i = 0; i < monos_.size(); ++i) index_.emplace(monos_[i], i);
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(std::size_t n, int d) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, d}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(n, d);
  return slot;
}

std::optional<std::size_t> MonomialBasis::find(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t MonomialBasis::index(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw Error(ErrorCode::DegreeTooHigh, "monomial outside basis");
  return it->second;
}

MomentVector::MomentVector(std::size_t n, int max_degree)
    : basis_(MonomialBasis::get(n, max_degree)),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

MomentVector::MomentVector(std::size_t n, int max_degree, Eigen::VectorXd values)
    : basis_(MonomialBasis::get(n, max_degree)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != basis_->size())
    throw Error(ErrorCode::LengthMismatch, "moment vector length");
}

double MomentVector::at(const Monomial& m) const {
  return values_[static_cast<Eigen::Index>(basis_->index(m))];
}

MomentVector MomentVector::truncated(int t) const {
  if (t > max_degree()) throw Error(ErrorCode::DegreeTooHigh, "truncation above max degree");
  auto len = static_cast<Eigen::Index>(basis_->prefix(t));
  return MomentVector(nvars(), t, values_.head(len));
}

HankelMatrix hankel_matrix(const MomentVector& sigma, int t) {
  return localizing_matrix(sigma, Polynomial::constant(sigma.nvars(), 1.0), t);
}

HankelMatrix localizing_matrix(const MomentVector& sigma, const Polynomial& g, int t) {
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix degree");
  if (g.nvars() != sigma.nvars()) throw Error(ErrorCode::LengthMismatch, "variable count");
  int dg = std::max(g.degree(), 0);
  if (2 * t + dg > sigma.max_degree())
    throw Error(ErrorCode::DegreeTooHigh, "2t + deg g exceeds the moment degree");
  HankelMatrix h;
  h.degree = t;
  h.basis = MonomialBasis::get(sigma.nvars(), t);
  const auto& rows = *h.basis;
  const auto& full = sigma.basis();
  auto dim = static_cast<Eigen::Index>(rows.size());
  h.entries = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      Monomial ab = rows[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(j)];
      double v = 0.0;
      for (const auto& [m, c] : g.terms()) v += c * sigma[full.index(ab * m)];
      h.entries(i, j) = v;
      h.entries(j, i) = v;
    }
  }
  return h;
}

MomentVector convolve(const Polynomial& g, const MomentVector& sigma) {
  if (g.nvars() != sigma.nvars()) throw Error(ErrorCode::LengthMismatch, "variable count");
  int dg = std::max(g.degree(), 0);
  int top = sigma.max_degree() - dg;
  if (top < 0) throw Error(ErrorCode::DegreeTooHigh, "deg g exceeds the moment degree");
  MomentVector out(sigma.nvars(), top);
  const auto& full = sigma.basis();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = 0.0;
    for (const auto& [m, c] : g.terms()) v += c * sigma[full.index(out.basis()[i] * m)];
    out.values()[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * 1e-8;
}

std::size_t numerical_rank(const Eigen::VectorXd& singular_values, double rank_tol) {
  if (singular_values.size() == 0) return 0;
  double top = singular_values.maxCoeff();
  if (top <= 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values[i] > rank_tol * top) ++r;
  return r;
}

KernelBasis kernel_basis(const HankelMatrix& h, double rank_tol) {
  KernelBasis kb;
  kb.tolerance = rank_tol;
  Eigen::Index dim = h.dim();
  std::size_t n = h.basis->nvars();
  if (dim == 0) return kb;
  // Symmetric input: singular values are |eigenvalues| and eigenvectors are
  // singular vectors.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.entries);
  Eigen::VectorXd abs_eigs = es.eigenvalues().cwiseAbs();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return abs_eigs[a] > abs_eigs[b]; });
  kb.singular_values.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) kb.singular_values[i] = abs_eigs[order[static_cast<std::size_t>(i)]];
  kb.rank = numerical_rank(kb.singular_values, rank_tol);
  auto nker = dim - static_cast<Eigen::Index>(kb.rank);
  kb.vectors.resize(dim, nker);
  for (Eigen::Index k = 0; k < nker; ++k) {
    kb.vectors.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(kb.rank) + static_cast<std::size_t>(k)]);
    Polynomial p(n);
    for (Eigen::Index i = 0; i < dim; ++i)
      if (kb.vectors(i, k) != 0.0)
        p += Polynomial::monomial((*h.basis)[static_cast<std::size_t>(i)], kb.vectors(i, k));
    kb.polynomials.push_back(std::move(p));
  }
  return kb;
}

double monomial_value(const Monomial& m, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < m.nvars(); ++i)
    for (int e = 0; e < m[i]; ++e) v *= x[i];
  return v;
}

MomentVector moments_of_points(const std::vector<std::vector<double>>& points,
                               const std::vector<double>& weights, int max_degree) {
  if (points.size() != weights.size())
    throw Error(ErrorCode::LengthMismatch, "points and weights differ in length");
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points");
  std::size_t n = points.front().size();
  for (const auto& p : points)
    if (p.size() != n) throw Error(ErrorCode::LengthMismatch, "point dimension");
  for (double w : weights)
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
  MomentVector sigma(n, max_degree);
  const auto& basis = sigma.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) v += weights[k] * monomial_value(basis[i], points[k]);
    sigma.values()[static_cast<Eigen::Index>(i)] = v;
  }
  return sigma;
}

double apply(const MomentVector& sigma, const Polynomial& p) {
  if (p.nvars() != sigma.nvars()) throw Error(ErrorCode::LengthMismatch, "variable count");
  if (p.degree() > sigma.max_degree())
    throw Error(ErrorCode::DegreeTooHigh, "polynomial degree exceeds the moment degree");
  double v = 0.0;
  for (const auto& [m, c] : p.terms()) v += c * sigma.at(m);
  return v;
}

}  // namespace momopt
