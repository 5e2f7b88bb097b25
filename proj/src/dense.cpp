#include "rsmat/dense.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_map.hpp"

namespace rsmat {

namespace {

void check_block(Index rows, Index cols, Index r0, Index c0, Index nr, Index nc) {
  if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows || c0 + nc > cols) {
    throw std::out_of_range("matrix block out of range");
  }
}


}  // namespace

ConstMatrixView ConstMatrixView::block(Index r0, Index c0, Index nr, Index nc) const {
  check_block(rows, cols, r0, c0, nr, nc);
  return {data + r0 + c0 * ld, nr, nc, ld};
}

MatrixView MatrixView::block(Index r0, Index c0, Index nr, Index nc) const {
  check_block(rows, cols, r0, c0, nr, nc);
  return {data + r0 + c0 * ld, nr, nc, ld};
}

DenseMatrix::DenseMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), 0.0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), values_(std::move(column_major)) {
  if (rows < 0 || cols < 0 || static_cast<Index>(values_.size()) != rows * cols) {
    throw std::invalid_argument("matrix storage does not match dimensions");
  }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Index m = static_cast<Index>(rows.size());
  const Index n = m > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
  DenseMatrix a(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) throw std::invalid_argument("ragged row literal");
    Index j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  return a;
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix a(n, n);
  for (Index i = 0; i < n; ++i) a(i, i) = 1.0;
  return a;
}

DenseMatrix DenseMatrix::copy_of(ConstMatrixView v) {
  DenseMatrix a(v.rows, v.cols);
  copy_into(v, a.view());
  return a;
}

void DenseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

void gemm(Op op_a, Op op_b, double alpha, ConstMatrixView a, ConstMatrixView b, double beta,
          MatrixView c) {
  const Index m = op_a == Op::none ? a.rows : a.cols;
  const Index k = op_a == Op::none ? a.cols : a.rows;
  const Index kb = op_b == Op::none ? b.rows : b.cols;
  const Index n = op_b == Op::none ? b.cols : b.rows;
  if (k != kb || c.rows != m || c.cols != n) throw std::invalid_argument("gemm: shape mismatch");
  if (m == 0 || n == 0) return;
  if (k == 0) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) c(i, j) = beta == 0.0 ? 0.0 : beta * c(i, j);
    return;
  }
  auto c_map = detail::as_eigen(c);
  if (beta == 0.0) {
    c_map.setZero();
  } else if (beta != 1.0) {
    c_map *= beta;
  }
  const auto a_map = detail::as_eigen(a);
  const auto b_map = detail::as_eigen(b);
  if (op_a == Op::none && op_b == Op::none) c_map.noalias() += alpha * (a_map * b_map);
  if (op_a == Op::trans && op_b == Op::none) c_map.noalias() += alpha * (a_map.transpose() * b_map);
  if (op_a == Op::none && op_b == Op::trans) c_map.noalias() += alpha * (a_map * b_map.transpose());
  if (op_a == Op::trans && op_b == Op::trans) c_map.noalias() += alpha * (a_map.transpose() * b_map.transpose());
}

DenseMatrix matmul(ConstMatrixView a, ConstMatrixView b, Op op_a, Op op_b) {
  const Index m = op_a == Op::none ? a.rows : a.cols;
  const Index n = op_b == Op::none ? b.cols : b.rows;
  DenseMatrix c(m, n);
  gemm(op_a, op_b, 1.0, a, b, 0.0, c.view());
  return c;
}

void copy_into(ConstMatrixView src, MatrixView dst) {
  if (src.rows != dst.rows || src.cols != dst.cols) throw std::invalid_argument("copy: shape mismatch");
  for (Index j = 0; j < src.cols; ++j)
    std::copy_n(src.data + j * src.ld, src.rows, dst.data + j * dst.ld);
}

void add_into(ConstMatrixView src, MatrixView dst, double alpha) {
  if (src.rows != dst.rows || src.cols != dst.cols) throw std::invalid_argument("add: shape mismatch");
  for (Index j = 0; j < src.cols; ++j)
    for (Index i = 0; i < src.rows; ++i) dst(i, j) += alpha * src(i, j);
}

void scale_columns(MatrixView dst, std::span<const double> scale) {
  if (static_cast<Index>(scale.size()) != dst.cols) throw std::invalid_argument("scale: length mismatch");
  for (Index j = 0; j < dst.cols; ++j)
    for (Index i = 0; i < dst.rows; ++i) dst(i, j) *= scale[j];
}

DenseMatrix hstack(ConstMatrixView a, ConstMatrixView b) {
  if (a.rows != b.rows) throw std::invalid_argument("hstack: row mismatch");
  DenseMatrix c(a.rows, a.cols + b.cols);
  copy_into(a, c.col_range(0, a.cols));
  copy_into(b, c.col_range(a.cols, b.cols));
  return c;
}

DenseMatrix vstack(ConstMatrixView a, ConstMatrixView b) {
  if (a.cols != b.cols) throw std::invalid_argument("vstack: column mismatch");
  DenseMatrix c(a.rows + b.rows, a.cols);
  copy_into(a, c.row_range(0, a.rows));
  copy_into(b, c.row_range(a.rows, b.rows));
  return c;
}

DenseMatrix block_diag(ConstMatrixView a, ConstMatrixView b) {
  DenseMatrix c(a.rows + b.rows, a.cols + b.cols);
  copy_into(a, c.block(0, 0, a.rows, a.cols));
  copy_into(b, c.block(a.rows, a.cols, b.rows, b.cols));
  return c;
}

DenseMatrix select_rows(ConstMatrixView a, std::span<const Index> rows) {
  DenseMatrix c(static_cast<Index>(rows.size()), a.cols);
  for (Index j = 0; j < a.cols; ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) c(static_cast<Index>(i), j) = a(rows[i], j);
  return c;
}

DenseMatrix select_cols(ConstMatrixView a, std::span<const Index> cols) {
  DenseMatrix c(a.rows, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    std::copy_n(a.data + cols[j] * a.ld, a.rows, c.data() + static_cast<Index>(j) * c.rows());
  return c;
}

DenseMatrix subtract(ConstMatrixView a, ConstMatrixView b) {
  DenseMatrix c = DenseMatrix::copy_of(a);
  add_into(b, c.view(), -1.0);
  return c;
}

double norm_fro(ConstMatrixView a) {
  // Scaled accumulation, so that huge or tiny entries do not overflow.
  double scale = 0.0, ssq = 1.0;
  for (Index j = 0; j < a.cols; ++j)
    for (Index i = 0; i < a.rows; ++i) {
      const double v = std::abs(a(i, j));
      if (v == 0.0) continue;
      if (scale < v) {
        ssq = 1.0 + ssq * (scale / v) * (scale / v);
        scale = v;
      } else {
        ssq += (v / scale) * (v / scale);
      }
    }
  return scale * std::sqrt(ssq);
}

double norm_max(ConstMatrixView a) {
  double m = 0.0;
  for (Index j = 0; j < a.cols; ++j)
    for (Index i = 0; i < a.rows; ++i) m = std::max(m, std::abs(a(i, j)));
  return m;
}

double norm_2(ConstMatrixView a) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  const Eigen::BDCSVD<Eigen::MatrixXd> f(detail::as_eigen(a));
  return f.singularValues()(0);
}

double orthonormality_defect(ConstMatrixView q) {
  if (q.cols == 0) return 0.0;
  DenseMatrix g = matmul(q, q, Op::trans, Op::none);
  for (Index i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return norm_max(g);
}

bool all_finite(ConstMatrixView a) {
  for (Index j = 0; j < a.cols; ++j)
    for (Index i = 0; i < a.rows; ++i)
      if (!std::isfinite(a(i, j))) return false;
  return true;
}

}  // namespace rsmat
