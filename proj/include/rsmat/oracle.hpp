#pragma once
//
// Black-box operator contract consumed by the compressors.
//
// A LinearOracle can apply A and A^T to a block of columns; that is the only
// access the compression sweeps have to the operator.
//

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>

#include "rsmat/dense.hpp"

namespace rsmat {

class LinearOracle {
 public:
  virtual ~LinearOracle() = default;
  virtual Index dim() const = 0;
  virtual DenseMatrix apply(const DenseMatrix& x) const = 0;
  virtual DenseMatrix apply_adjoint(const DenseMatrix& x) const = 0;
};

using OraclePtr = std::shared_ptr<const LinearOracle>;

class DenseOracle final : public LinearOracle {
 public:
  explicit DenseOracle(DenseMatrix a);
  Index dim() const override { return a_.rows(); }
  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_adjoint(const DenseMatrix& x) const override;
  const DenseMatrix& matrix() const { return a_; }

 private:
  DenseMatrix a_;
};

// Wraps another oracle and tallies the columns passed through it plus the
// wall time spent inside the wrapped calls. Counters are atomic, so the
// wrapper may be shared between threads.
class CountingOracle final : public LinearOracle {
 public:
  explicit CountingOracle(OraclePtr inner);
  Index dim() const override { return inner_->dim(); }
  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_adjoint(const DenseMatrix& x) const override;

  Index matvec_count() const { return matvec_count_.load(); }
  Index adjoint_count() const { return adjoint_count_.load(); }
  double apply_seconds() const { return static_cast<double>(apply_ns_.load()) * 1e-9; }
  double adjoint_seconds() const { return static_cast<double>(adjoint_ns_.load()) * 1e-9; }
  double oracle_seconds() const { return apply_seconds() + adjoint_seconds(); }
  void reset();

 private:
  OraclePtr inner_;
  mutable std::atomic<Index> matvec_count_{0};
  mutable std::atomic<Index> adjoint_count_{0};
  mutable std::atomic<std::int64_t> apply_ns_{0};
  mutable std::atomic<std::int64_t> adjoint_ns_{0};
};

// apply = left . right, apply_adjoint = right^T . left^T.
class ProductOracle final : public LinearOracle {
 public:
  ProductOracle(OraclePtr left, OraclePtr right);
  Index dim() const override { return left_->dim(); }
  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_adjoint(const DenseMatrix& x) const override;

 private:
  OraclePtr left_;
  OraclePtr right_;
};

// Oracle built from two callables; used to expose compressed formats.
class CallbackOracle final : public LinearOracle {
 public:
  using Fn = std::function<DenseMatrix(const DenseMatrix&)>;
  CallbackOracle(Index n, Fn apply, Fn apply_adjoint);
  Index dim() const override { return n_; }
  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_adjoint(const DenseMatrix& x) const override;

 private:
  Index n_;
  Fn apply_;
  Fn adjoint_;
};

OraclePtr dense_oracle(DenseMatrix a);
OraclePtr product_oracle(OraclePtr left, OraclePtr right);

// Materializes the operator column by column (A * I). Test and small-N use only.
DenseMatrix densify(const LinearOracle& op);

}  // namespace rsmat
