#pragma once
// Shared helpers for the unit tests: random inputs and dense references.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "rsmat/dense.hpp"
#include "rsmat/linalg.hpp"
#include "rsmat/rng.hpp"

namespace testutil {

using rsmat::DenseMatrix;
using rsmat::Index;

inline DenseMatrix gaussian(Index m, Index n, std::uint64_t seed) { return rsmat::gaussian_block(m, n, seed); }

// Orthonormal m x k from a Gram-Schmidt pass over Gaussian columns (twice,
// for stability). Deliberately not the library QR.
inline DenseMatrix orthonormal(Index m, Index k, std::uint64_t seed) {
  DenseMatrix q = gaussian(m, k, seed);
  for (int pass = 0; pass < 2; ++pass)
    for (Index j = 0; j < k; ++j) {
      for (Index i = 0; i < j; ++i) {
        double d = 0.0;
        for (Index r = 0; r < m; ++r) d += q(r, i) * q(r, j);
        for (Index r = 0; r < m; ++r) q(r, j) -= d * q(r, i);
      }
      double nrm = 0.0;
      for (Index r = 0; r < m; ++r) nrm += q(r, j) * q(r, j);
      nrm = std::sqrt(nrm);
      for (Index r = 0; r < m; ++r) q(r, j) /= nrm;
    }
  return q;
}

// U diag(s) V^T with random orthonormal U, V.
inline DenseMatrix planted_spectrum(Index m, Index n, const std::vector<double>& s, std::uint64_t seed) {
  const auto k = static_cast<Index>(s.size());
  DenseMatrix u = orthonormal(m, k, seed);
  const DenseMatrix v = orthonormal(n, k, seed + 7919);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < m; ++i) u(i, j) *= s[static_cast<std::size_t>(j)];
  return rsmat::matmul(u, v, rsmat::Op::none, rsmat::Op::trans);
}

// Plain triple loop; the reference the fast paths are compared against.
inline DenseMatrix naive_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (Index j = 0; j < b.cols(); ++j)
    for (Index k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      for (Index i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  return c;
}

inline double dot(const DenseMatrix& a, const DenseMatrix& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

inline double diff_fro(const DenseMatrix& a, const DenseMatrix& b) { return rsmat::norm_fro(rsmat::subtract(a, b)); }

inline bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) { return a == b; }

// Probe estimate of the relative error of `apply` against dense A: max over
// `trials` normalized Gaussian vectors of |A w - apply(w)| / |A w|.
inline double probe_error(const DenseMatrix& a, const std::function<DenseMatrix(const DenseMatrix&)>& apply,
                          int trials = 10, std::uint64_t seed = 99) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    DenseMatrix w = gaussian(a.cols(), 1, seed + static_cast<std::uint64_t>(t));
    const double nw = rsmat::norm_fro(w);
    for (double& v : w.values()) v /= nw;
    const DenseMatrix aw = naive_product(a, w);
    worst = std::max(worst, diff_fro(aw, apply(w)) / rsmat::norm_fro(aw));
  }
  return worst;
}

// A with every entry outside the listed (row range, column range) blocks zeroed.
struct Block {
  Index r0, nr, c0, nc;
};
inline DenseMatrix masked(const DenseMatrix& a, const std::vector<Block>& keep) {
  DenseMatrix out(a.rows(), a.cols());
  for (const Block& b : keep)
    for (Index j = b.c0; j < b.c0 + b.nc; ++j)
      for (Index i = b.r0; i < b.r0 + b.nr; ++i) out(i, j) = a(i, j);
  return out;
}

}  // namespace testutil
