#pragma once
//
// Column-major dense matrices and thin views over them.
//
// Every numerical kernel in the library works on these types. Products go
// through Eigen; views never own memory and carry an explicit leading
// dimension so that row ranges of a larger block can be handed to BLAS
// without copying.
//

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace rsmat {

using Index = std::int64_t;

struct ConstMatrixView {
  const double* data = nullptr;
  Index rows = 0;
  Index cols = 0;
  Index ld = 1;

  const double& operator()(Index i, Index j) const { return data[i + j * ld]; }
  ConstMatrixView block(Index r0, Index c0, Index nr, Index nc) const;
  ConstMatrixView row_range(Index r0, Index nr) const { return block(r0, 0, nr, cols); }
  ConstMatrixView col_range(Index c0, Index nc) const { return block(0, c0, rows, nc); }
};

struct MatrixView {
  double* data = nullptr;
  Index rows = 0;
  Index cols = 0;
  Index ld = 1;

  double& operator()(Index i, Index j) const { return data[i + j * ld]; }
  MatrixView block(Index r0, Index c0, Index nr, Index nc) const;
  MatrixView row_range(Index r0, Index nr) const { return block(r0, 0, nr, cols); }
  MatrixView col_range(Index c0, Index nc) const { return block(0, c0, rows, nc); }
  operator ConstMatrixView() const { return {data, rows, cols, ld}; }
};

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols);
  DenseMatrix(Index rows, Index cols, std::vector<double> column_major);
  // Row-major literal, convenient in tests: DenseMatrix::from_rows({{1,2},{3,4}}).
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(Index n);
  static DenseMatrix copy_of(ConstMatrixView v);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  Index size() const { return rows_ * cols_; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator()(Index i, Index j) { return values_[i + j * rows_]; }
  double operator()(Index i, Index j) const { return values_[i + j * rows_]; }

  MatrixView view() { return {values_.data(), rows_, cols_, ld()}; }
  ConstMatrixView view() const { return {values_.data(), rows_, cols_, ld()}; }
  operator ConstMatrixView() const { return view(); }

  MatrixView block(Index r0, Index c0, Index nr, Index nc) { return view().block(r0, c0, nr, nc); }
  ConstMatrixView block(Index r0, Index c0, Index nr, Index nc) const {
    return view().block(r0, c0, nr, nc);
  }
  MatrixView row_range(Index r0, Index nr) { return view().row_range(r0, nr); }
  ConstMatrixView row_range(Index r0, Index nr) const { return view().row_range(r0, nr); }
  MatrixView col_range(Index c0, Index nc) { return view().col_range(c0, nc); }
  ConstMatrixView col_range(Index c0, Index nc) const { return view().col_range(c0, nc); }

  void set_zero();
  DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  Index ld() const { return rows_ > 0 ? rows_ : 1; }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
};

enum class Op { none, trans };

// C = alpha * op(A) * op(B) + beta * C.
void gemm(Op op_a, Op op_b, double alpha, ConstMatrixView a, ConstMatrixView b, double beta,
          MatrixView c);

DenseMatrix matmul(ConstMatrixView a, ConstMatrixView b, Op op_a = Op::none, Op op_b = Op::none);

void copy_into(ConstMatrixView src, MatrixView dst);
void add_into(ConstMatrixView src, MatrixView dst, double alpha = 1.0);
// dst(:, j) *= scale[j]
void scale_columns(MatrixView dst, std::span<const double> scale);

DenseMatrix hstack(ConstMatrixView a, ConstMatrixView b);
DenseMatrix vstack(ConstMatrixView a, ConstMatrixView b);
DenseMatrix block_diag(ConstMatrixView a, ConstMatrixView b);
DenseMatrix select_rows(ConstMatrixView a, std::span<const Index> rows);
DenseMatrix select_cols(ConstMatrixView a, std::span<const Index> cols);
DenseMatrix subtract(ConstMatrixView a, ConstMatrixView b);

double norm_fro(ConstMatrixView a);
double norm_max(ConstMatrixView a);
// Largest singular value, computed exactly through an SVD.
double norm_2(ConstMatrixView a);
// max |Q^T Q - I|.
double orthonormality_defect(ConstMatrixView q);
bool all_finite(ConstMatrixView a);

}  // namespace rsmat
