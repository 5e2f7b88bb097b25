#pragma once
// Eigen views over rsmat storage. Internal header.

#include <Eigen/Dense>

#include "rsmat/dense.hpp"

namespace rsmat::detail {

using Stride = Eigen::OuterStride<>;
using ConstMap = Eigen::Map<const Eigen::MatrixXd, 0, Stride>;
using MutMap = Eigen::Map<Eigen::MatrixXd, 0, Stride>;

inline ConstMap as_eigen(ConstMatrixView v) { return ConstMap(v.data, v.rows, v.cols, Stride(v.ld)); }
inline MutMap as_eigen(MatrixView v) { return MutMap(v.data, v.rows, v.cols, Stride(v.ld)); }

inline DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(m.rows(), m.cols());
  as_eigen(out.view()) = m;
  return out;
}

}  // namespace rsmat::detail
