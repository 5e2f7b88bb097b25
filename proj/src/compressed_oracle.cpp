#include "rsmat/compressed_oracle.hpp"

#include <stdexcept>

namespace rsmat {

namespace {

template <class M, class ApplyFn>
OraclePtr wrap(std::shared_ptr<const M> h, ApplyFn fn, Exec exec) {
  if (!h) throw std::invalid_argument("compressed_oracle: null matrix");
  return std::make_shared<CallbackOracle>(
      h->size(), [h, fn, exec](const DenseMatrix& x) { return fn(*h, x, false, exec); },
      [h, fn, exec](const DenseMatrix& x) { return fn(*h, x, true, exec); });
}

}  // namespace

OraclePtr compressed_oracle(std::shared_ptr<const HodlrMatrix> h, Exec exec) {
  return wrap(std::move(h), [](const HodlrMatrix& m, const DenseMatrix& x, bool adj, Exec e) {
    return hodlr_apply(m, x, adj, e);
  }, exec);
}

OraclePtr compressed_oracle(std::shared_ptr<const HbsMatrix> h, Exec exec) {
  return wrap(std::move(h), [](const HbsMatrix& m, const DenseMatrix& x, bool adj, Exec e) {
    return hbs_apply(m, x, adj, e);
  }, exec);
}

OraclePtr compressed_oracle(std::shared_ptr<const HbsIdMatrix> h, Exec exec) {
  return wrap(std::move(h), [](const HbsIdMatrix& m, const DenseMatrix& x, bool adj, Exec e) {
    return hbs_apply(m, x, adj, e);
  }, exec);
}

OraclePtr compressed_oracle(std::shared_ptr<const CompressedMatrix> m, Exec exec) {
  if (!m) throw std::invalid_argument("compressed_oracle: null matrix");
  return std::make_shared<CallbackOracle>(
      compressed_size(*m), [m, exec](const DenseMatrix& x) { return compressed_apply(*m, x, false, exec); },
      [m, exec](const DenseMatrix& x) { return compressed_apply(*m, x, true, exec); });
}

}  // namespace rsmat
