#include "momopt/extract.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "momopt/error.hpp"

namespace momopt {

const char* to_string(ExtractionFailure f) {
  switch (f) {
    case ExtractionFailure::None: return "None";
    case ExtractionFailure::NoFlatness: return "NoFlatness";
    case ExtractionFailure::ComplexPoints: return "ComplexPoints";
    case ExtractionFailure::ResidualTooLarge: return "ResidualTooLarge";
  }
  return "Unknown";
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

constexpr double kImagTol = 1e-6;
constexpr double kClusterTol = 1e-8;

struct Spectrum {
  VectorXd singular_values;  // descending
  MatrixXd vectors;          // matching eigenvectors
};

Spectrum spectrum(const MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  Index n = h.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  VectorXd a = es.eigenvalues().cwiseAbs();
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return a[x] > a[y]; });
  Spectrum s;
  s.singular_values.resize(n);
  s.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    s.singular_values[i] = a[order[static_cast<std::size_t>(i)]];
    s.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  return s;
}

double rank_tol_for(const ExtractOptions& opts, Index dim) {
  return opts.rank_tol > 0.0 ? opts.rank_tol : default_rank_tol(dim, dim);
}

double measure_residual(const MomentVector& sigma, const std::vector<std::vector<double>>& pts,
                        const std::vector<double>& w, int top) {
  const auto& basis = sigma.basis();
  std::size_t len = basis.prefix(std::min(top, sigma.max_degree()));
  double worst = 0.0;
  for (std::size_t a = 0; a < len; ++a) {
    double v = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) v += w[k] * monomial_value(basis[a], pts[k]);
    worst = std::max(worst, std::abs(sigma[a] - v));
  }
  return worst;
}

// Least-squares weights from the moments of the lowest degree in [lo, hi]
// whose Vandermonde matrix separates the points.
std::vector<double> fit_weights(const MomentVector& sigma, const std::vector<std::vector<double>>& pts,
                                int lo, int hi) {
  const auto& basis = sigma.basis();
  auto cols = static_cast<Index>(pts.size());
  hi = std::min(hi, sigma.max_degree());
  for (int deg = std::min(lo, hi);; ++deg) {
    auto rows = static_cast<Index>(basis.prefix(deg));
    MatrixXd V(rows, cols);
    VectorXd rhs(rows);
    for (Index a = 0; a < rows; ++a) {
      rhs[a] = sigma[static_cast<std::size_t>(a)];
      for (Index k = 0; k < cols; ++k)
        V(a, k) = monomial_value(basis[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(k)]);
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(V);
    qr.setThreshold(1e-10);
    if (qr.rank() == cols || deg >= hi) {
      VectorXd w = qr.solve(rhs);
      return std::vector<double>(w.data(), w.data() + w.size());
    }
  }
}

struct Attempt {
  bool ok = false;
  ExtractionFailure failure = ExtractionFailure::None;
  ExtractedMeasure measure;
  double residual = std::numeric_limits<double>::infinity();
};

Attempt extract_at(const MomentVector& sigma, int t, std::size_t r, const Spectrum& sp,
                   const ExtractOptions& opts, bool flat) {
  Attempt at;
  std::size_t n = sigma.nvars();
  HankelMatrix h = hankel_matrix(sigma, t);
  const auto& rows = *h.basis;
  auto low = static_cast<Index>(rows.prefix(t - 1));
  auto ri = static_cast<Index>(r);
  if (r == 0 || ri > low) {
    at.failure = ExtractionFailure::NoFlatness;
    return at;
  }

  // Basis monomials of degree <= t-1: the best-conditioned columns of the
  // dominant eigenvector block.
  MatrixXd top = sp.vectors.leftCols(ri).topRows(low).transpose();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(top);
  std::vector<std::size_t> B;
  for (Index i = 0; i < ri; ++i) B.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()[i]));

  MatrixXd HB(h.dim(), ri);
  for (Index j = 0; j < ri; ++j) HB.col(j) = h.entries.col(static_cast<Index>(B[static_cast<std::size_t>(j)]));
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(HB);

  std::vector<MatrixXd> M(n);
  for (std::size_t i = 0; i < n; ++i) {
    MatrixXd HxB(h.dim(), ri);
    for (Index j = 0; j < ri; ++j) {
      Monomial shifted = rows[B[static_cast<std::size_t>(j)]] * Monomial::unit(n, i);
      HxB.col(j) = h.entries.col(static_cast<Index>(rows.index(shifted)));
    }
    M[i] = cod.solve(HxB);
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces;
  for (int draw = 0; draw < 2; ++draw) {
    VectorXd lam(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) lam[static_cast<Index>(i)] = 0.05 + unif(rng);
    lam /= lam.sum();
    MatrixXd Ml = MatrixXd::Zero(ri, ri);
    for (std::size_t i = 0; i < n; ++i) Ml += lam[static_cast<Index>(i)] * M[i];
    ces.compute(Ml.cast<cplx>());
    const auto& ev = ces.eigenvalues();
    double scale = 1.0 + ev.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < ev.size(); ++a)
      for (Index b = a + 1; b < ev.size(); ++b) gap = std::min(gap, std::abs(ev[a] - ev[b]));
    if (gap >= kClusterTol * scale) break;
  }

  std::vector<std::vector<double>> pts;
  bool dropped = false;
  for (Index k = 0; k < ri; ++k) {
    Eigen::VectorXcd v = ces.eigenvectors().col(k);
    cplx vv = v.squaredNorm();
    std::vector<double> p(n);
    bool real = true;
    for (std::size_t i = 0; i < n; ++i) {
      cplx c = v.dot(M[i].cast<cplx>() * v) / vv;
      if (std::abs(c.imag()) > kImagTol * (1.0 + std::abs(c.real()))) real = false;
      p[i] = c.real();
    }
    if (real)
      pts.push_back(std::move(p));
    else
      dropped = true;
  }
  if (pts.empty()) {
    at.failure = ExtractionFailure::ComplexPoints;
    return at;
  }

  // Weights from the lowest moment degree that separates the points.
  const int lo = std::min(2, t);
  const int hi = flat ? 2 * t : 2 * t - 1;
  std::vector<double> w = fit_weights(sigma, pts, lo, hi);
  for (int round = 0; round < 4; ++round) {
    std::vector<std::vector<double>> keep_p;
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (w[k] > opts.residual_tol) keep_p.push_back(pts[k]);
    if (keep_p.size() == pts.size()) break;
    pts = std::move(keep_p);
    if (pts.empty()) break;
    w = fit_weights(sigma, pts, lo, hi);
  }
  if (pts.empty()) {
    at.failure = dropped ? ExtractionFailure::ComplexPoints : ExtractionFailure::ResidualTooLarge;
    return at;
  }

  // Canonical order makes the output independent of the input ordering.
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  for (std::size_t k : idx) {
    at.measure.points.push_back(pts[k]);
    at.measure.weights.push_back(w[k]);
  }
  at.measure.degree_used = t;
  at.measure.rank = at.measure.points.size();
  at.measure.flat = flat;
  at.residual = verify_measure(sigma, at.measure);
  at.measure.residual = at.residual;
  at.ok = at.residual <= opts.residual_tol;
  if (!at.ok) at.failure = dropped ? ExtractionFailure::ComplexPoints : ExtractionFailure::ResidualTooLarge;
  return at;
}

}  // namespace

ExtractionResult extract_measure(const MomentVector& sigma, const ExtractOptions& opts) {
  if (sigma.max_degree() < 2) throw Error(ErrorCode::DegreeTooHigh, "extraction needs moments of degree >= 2");
  ExtractionResult res;
  int k = sigma.max_degree() / 2;
  std::vector<Spectrum> spectra;
  for (int t = 0; t <= k; ++t) {
    HankelMatrix h = hankel_matrix(sigma, t);
    spectra.push_back(spectrum(h.entries));
    res.ranks.push_back(numerical_rank(spectra.back().singular_values, rank_tol_for(opts, h.dim())));
  }

  // Flat degrees from the top down, then a tentative attempt at t = k.
  std::vector<std::pair<int, bool>> candidates;
  for (int t = k; t >= 1; --t)
    if (res.ranks[static_cast<std::size_t>(t)] == res.ranks[static_cast<std::size_t>(t - 1)])
      candidates.emplace_back(t, true);
  bool any_flat = !candidates.empty();
  if (!any_flat) candidates.emplace_back(k, false);

  Attempt best;
  for (auto [t, flat] : candidates) {
    const Spectrum& sp = spectra[static_cast<std::size_t>(t)];
    Attempt at = extract_at(sigma, t, res.ranks[static_cast<std::size_t>(t)], sp, opts, flat);
    res.singular_values = sp.singular_values;
    if (at.ok) {
      res.ok = true;
      res.measure = std::move(at.measure);
      res.residual = at.residual;
      return res;
    }
    if (at.residual < best.residual || best.failure == ExtractionFailure::None) best = std::move(at);
  }
  res.ok = false;
  res.failure = any_flat ? best.failure : ExtractionFailure::NoFlatness;
  if (res.failure == ExtractionFailure::None) res.failure = ExtractionFailure::ResidualTooLarge;
  res.measure = std::move(best.measure);
  res.residual = best.residual;
  return res;
}

double verify_measure(const MomentVector& sigma, const ExtractedMeasure& m) {
  if (m.points.size() != m.weights.size())
    throw Error(ErrorCode::LengthMismatch, "points and weights differ in length");
  for (const auto& p : m.points)
    if (p.size() != sigma.nvars()) throw Error(ErrorCode::LengthMismatch, "point dimension");
  return measure_residual(sigma, m.points, m.weights, m.flat ? 2 * m.degree_used : 2 * m.degree_used - 1);
}

}  // namespace momopt
