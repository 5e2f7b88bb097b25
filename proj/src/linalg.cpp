#include "rsmat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eigen_map.hpp"
#include "rsmat/rng.hpp"

namespace rsmat {

namespace {

void require_nonempty(ConstMatrixView a, const char* what) {
  if (a.rows == 0 || a.cols == 0) throw std::invalid_argument(std::string(what) + ": empty matrix");
}

void require_rank_in_range(const FactorizationMode& mode, Index kmax, const char* what) {
  if (const auto* fr = std::get_if<FixedRank>(&mode)) {
    if (fr->k < 1 || fr->k > kmax) throw std::invalid_argument(std::string(what) + ": rank out of range");
  }
  if (const auto* tol = std::get_if<Tolerance>(&mode)) {
    if (!(tol->eps > 0.0) || !std::isfinite(tol->eps))
      throw std::invalid_argument(std::string(what) + ": tolerance must be positive");
  }
}

using PivotedQr = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;

// Column-pivoted Householder QR; pivots[j] is the original index of the j-th
// pivoted column.
PivotedQr pivoted_qr(ConstMatrixView a, std::vector<Index>& pivots) {
  PivotedQr f(detail::as_eigen(a));
  const auto& idx = f.colsPermutation().indices();
  pivots.resize(static_cast<std::size_t>(a.cols));
  for (Index j = 0; j < a.cols; ++j) pivots[static_cast<std::size_t>(j)] = idx(j);
  return f;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// Smallest k such that ||R(k:, k:)||_2 <= eps * ||R||_2, which is exactly the
// spectral residual of the rank-k truncation. The trailing norm only shrinks
// as k grows; the Frobenius and largest-column norms of the tail bracket it,
// so only the bracketed range is searched with SVDs.
Index tolerance_rank(const Eigen::MatrixXd& r, double eps) {
  const Index kmax = std::min(r.rows(), r.cols());
  const Eigen::MatrixXd upper = r.topRows(kmax).triangularView<Eigen::Upper>();
  const double sigma1 = spectral_norm(upper);
  if (sigma1 == 0.0) return 0;
  const double thresh = eps * sigma1;
  auto tail = [&](Index k) { return upper.bottomRightCorner(kmax - k, upper.cols() - k); };
  Index hi = kmax, lo = 0;
  for (Index k = 0; k <= kmax; ++k)
    if (k == kmax || tail(k).norm() <= thresh) {
      hi = k;
      break;
    }
  for (Index k = hi; k > 0; --k)
    if (tail(k - 1).colwise().norm().maxCoeff() > thresh) {
      lo = k;
      break;
    }
  // Invariant: the answer lies in [lo, hi].
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    if (spectral_norm(tail(mid)) <= thresh) hi = mid;
    else lo = mid + 1;
  }
  return hi;
}

// Leading diagonal entries of R that are not negligible against |R(0,0)|.
Index structural_rank(const Eigen::MatrixXd& r) {
  const Index kmax = std::min(r.rows(), r.cols());
  if (kmax == 0) return 0;
  const double lead = std::abs(r(0, 0));
  Index k = 0;
  while (k < kmax && std::abs(r(k, k)) > kZeroColumnThreshold * lead) ++k;
  return k;
}

}  // namespace

QrResult qr(ConstMatrixView a, const FactorizationMode& mode) {
  require_nonempty(a, "qr");
  const Index kmax = std::min(a.rows, a.cols);
  require_rank_in_range(mode, kmax, "qr");

  QrResult out;
  const PivotedQr f = pivoted_qr(a, out.pivots);
  const Eigen::MatrixXd& packed = f.matrixQR();

  Index k = kmax;
  if (const auto* fr = std::get_if<FixedRank>(&mode)) k = fr->k;
  if (const auto* tol = std::get_if<Tolerance>(&mode)) k = tolerance_rank(packed, tol->eps);

  const Eigen::MatrixXd r = packed.topRows(k).triangularView<Eigen::Upper>();
  out.r = detail::from_eigen(r);
  const Eigen::MatrixXd q = f.householderQ() * Eigen::MatrixXd::Identity(a.rows, k);
  out.q = detail::from_eigen(q);
  return out;
}

SvdResult svd(ConstMatrixView a, const FactorizationMode& mode) {
  require_nonempty(a, "svd");
  const Index kmax = std::min(a.rows, a.cols);
  require_rank_in_range(mode, kmax, "svd");

  const Eigen::BDCSVD<Eigen::MatrixXd> f(detail::as_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (f.info() != Eigen::Success) throw std::runtime_error("svd: no convergence");
  const Eigen::VectorXd& s = f.singularValues();

  Index k = kmax;
  if (const auto* fr = std::get_if<FixedRank>(&mode)) k = fr->k;
  if (const auto* tol = std::get_if<Tolerance>(&mode)) {
    const double thresh = tol->relative ? tol->eps * s(0) : tol->eps;
    k = 0;
    while (k < kmax && s(k) > thresh) ++k;
  }

  SvdResult out;
  out.u = detail::from_eigen(f.matrixU().leftCols(k));
  out.s.assign(s.data(), s.data() + k);
  out.v = detail::from_eigen(f.matrixV().leftCols(k));
  return out;
}

IdResult id_decompose(ConstMatrixView a, const FactorizationMode& mode) {
  require_nonempty(a, "id");
  const Index n = a.cols, kmax = std::min(a.rows, a.cols);
  require_rank_in_range(mode, kmax, "id");

  IdResult out;
  const PivotedQr f = pivoted_qr(a, out.pivots);
  const Eigen::MatrixXd& packed = f.matrixQR();

  Index k = structural_rank(packed);
  if (const auto* fr = std::get_if<FixedRank>(&mode)) k = fr->k;
  if (const auto* tol = std::get_if<Tolerance>(&mode)) k = tolerance_rank(packed, tol->eps);
  out.rank = k;

  // T = R11^{-1} R12, then scatter [I_k, T] back to the original column order.
  Eigen::MatrixXd t = packed.block(0, k, k, n - k);
  if (k > 0 && n > k) packed.topLeftCorner(k, k).triangularView<Eigen::Upper>().solveInPlace(t);
  out.x = DenseMatrix(k, n);
  for (Index j = 0; j < k; ++j) out.x(j, out.pivots[j]) = 1.0;
  for (Index j = 0; j < n - k; ++j)
    for (Index i = 0; i < k; ++i) out.x(i, out.pivots[k + j]) = t(i, j);
  return out;
}

DenseMatrix orthonormal_basis(ConstMatrixView y) {
  std::vector<double> norms(static_cast<std::size_t>(y.cols));
  double largest = 0.0;
  for (Index j = 0; j < y.cols; ++j) {
    norms[j] = norm_fro(y.col_range(j, 1));
    largest = std::max(largest, norms[j]);
  }
  std::vector<Index> keep;
  for (Index j = 0; j < y.cols; ++j)
    if (norms[j] > kZeroColumnThreshold * largest) keep.push_back(j);
  if (keep.empty() || y.rows == 0) return DenseMatrix(y.rows, 0);
  const DenseMatrix kept = select_cols(y, keep);
  return qr(kept, Full{}).q;
}

DenseMatrix randomized_range(const Sampler& sampler, Index n, Index k, Index p, std::uint64_t seed) {
  if (k < 0 || p < 0 || k + p < 1 || k + p > n)
    throw std::invalid_argument("randomized_range: need 1 <= k + p <= n");
  const DenseMatrix omega = gaussian_block(n, k + p, seed);
  const DenseMatrix y = sampler(omega);
  if (y.cols() != k + p) throw std::invalid_argument("randomized_range: sampler changed column count");
  return orthonormal_basis(y);
}

}  // namespace rsmat
