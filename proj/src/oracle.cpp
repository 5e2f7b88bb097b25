#include "rsmat/oracle.hpp"

#include <stdexcept>

namespace rsmat {

namespace {

void check_rows(const LinearOracle& op, const DenseMatrix& x) {
  if (x.rows() != op.dim()) throw std::invalid_argument("oracle: input row count does not match dimension");
}

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

DenseOracle::DenseOracle(DenseMatrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw std::invalid_argument("dense_oracle: matrix must be square");
}

DenseMatrix DenseOracle::apply(const DenseMatrix& x) const {
  check_rows(*this, x);
  return matmul(a_, x);
}

DenseMatrix DenseOracle::apply_adjoint(const DenseMatrix& x) const {
  check_rows(*this, x);
  return matmul(a_, x, Op::trans, Op::none);
}

CountingOracle::CountingOracle(OraclePtr inner) : inner_(std::move(inner)) {
  if (!inner_) throw std::invalid_argument("CountingOracle: null inner oracle");
}

DenseMatrix CountingOracle::apply(const DenseMatrix& x) const {
  const auto start = std::chrono::steady_clock::now();
  DenseMatrix y = inner_->apply(x);
  apply_ns_ += elapsed_ns(start);
  matvec_count_ += x.cols();
  return y;
}

DenseMatrix CountingOracle::apply_adjoint(const DenseMatrix& x) const {
  const auto start = std::chrono::steady_clock::now();
  DenseMatrix y = inner_->apply_adjoint(x);
  adjoint_ns_ += elapsed_ns(start);
  adjoint_count_ += x.cols();
  return y;
}

void CountingOracle::reset() {
  matvec_count_ = 0;
  adjoint_count_ = 0;
  apply_ns_ = 0;
  adjoint_ns_ = 0;
}

ProductOracle::ProductOracle(OraclePtr left, OraclePtr right) : left_(std::move(left)), right_(std::move(right)) {
  if (!left_ || !right_) throw std::invalid_argument("product_oracle: null factor");
  if (left_->dim() != right_->dim()) throw std::invalid_argument("product_oracle: dimension mismatch");
}

DenseMatrix ProductOracle::apply(const DenseMatrix& x) const { return left_->apply(right_->apply(x)); }

DenseMatrix ProductOracle::apply_adjoint(const DenseMatrix& x) const {
  return right_->apply_adjoint(left_->apply_adjoint(x));
}

CallbackOracle::CallbackOracle(Index n, Fn apply, Fn apply_adjoint)
    : n_(n), apply_(std::move(apply)), adjoint_(std::move(apply_adjoint)) {}

DenseMatrix CallbackOracle::apply(const DenseMatrix& x) const {
  check_rows(*this, x);
  return apply_(x);
}

DenseMatrix CallbackOracle::apply_adjoint(const DenseMatrix& x) const {
  check_rows(*this, x);
  return adjoint_(x);
}

OraclePtr dense_oracle(DenseMatrix a) { return std::make_shared<DenseOracle>(std::move(a)); }

OraclePtr product_oracle(OraclePtr left, OraclePtr right) {
  return std::make_shared<ProductOracle>(std::move(left), std::move(right));
}

DenseMatrix densify(const LinearOracle& op) { return op.apply(DenseMatrix::identity(op.dim())); }

}  // namespace rsmat
