#pragma once
//
// Dense factorizations in three calling modes (full, fixed rank, tolerance)
// and the randomized range finder.
//
// The factorizations are thin wrappers over Eigen's column-pivoted Householder
// QR and divide-and-conquer SVD; what this layer adds is the rank selection
// rule for each mode and the interpolative decomposition built from the
// pivoted QR.
//

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "rsmat/dense.hpp"

namespace rsmat {

struct Full {};
struct FixedRank {
  Index k;
};
// svd: keep sigma_j while sigma_j > eps (absolute) or > eps * sigma_1 (relative).
// qr and id always measure the residual relative to ||A||.
struct Tolerance {
  double eps;
  bool relative = false;
};
using FactorizationMode = std::variant<Full, FixedRank, Tolerance>;

// A(:, pivots) ~= Q * R; Q is m x k orthonormal, R is k x n upper trapezoidal.
struct QrResult {
  DenseMatrix q;
  DenseMatrix r;
  std::vector<Index> pivots;  // 0-based permutation of all n columns
  Index rank() const { return q.cols(); }
};

// A ~= U diag(s) V^T with s nonincreasing.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> s;
  DenseMatrix v;
  Index rank() const { return static_cast<Index>(s.size()); }
};

// A ~= A(:, skeleton()) * x, and x(:, skeleton()) is exactly the k x k identity.
struct IdResult {
  DenseMatrix x;
  std::vector<Index> pivots;  // 0-based permutation of all n columns
  Index rank = 0;
  std::span<const Index> skeleton() const { return {pivots.data(), static_cast<std::size_t>(rank)}; }
};

QrResult qr(ConstMatrixView a, const FactorizationMode& mode);
SvdResult svd(ConstMatrixView a, const FactorizationMode& mode);
IdResult id_decompose(ConstMatrixView a, const FactorizationMode& mode);

// Columns whose norm is at or below this fraction of the largest column norm
// in the block are treated as exactly zero.
inline constexpr double kZeroColumnThreshold = 1e-14;

using Sampler = std::function<DenseMatrix(const DenseMatrix&)>;

// Orthonormal basis for the range of a linear sampler from R^n, built from
// k + p Gaussian probes. Numerically zero sample columns are discarded, so
// the zero map yields an empty basis.
DenseMatrix randomized_range(const Sampler& sampler, Index n, Index k, Index p, std::uint64_t seed);

// Orthonormal basis of the column space of y after dropping zero columns.
DenseMatrix orthonormal_basis(ConstMatrixView y);

}  // namespace rsmat
