#pragma once
//
// HODLR matrices: every sibling block stored as U diag(b) V^T, leaf diagonal
// blocks stored dense, compressed from products with A and A^T only.
//

#include <cstdint>
#include <vector>

#include "rsmat/dense.hpp"
#include "rsmat/index_tree.hpp"
#include "rsmat/oracle.hpp"
#include "rsmat/parallel.hpp"

namespace rsmat {

// Factors of the two off-diagonal blocks below a non-leaf node with children
// a (left) and b (right):
//   A(I_a, I_b) ~= u_ab diag(s_ab) v_ab^T,   A(I_b, I_a) ~= u_ba diag(s_ba) v_ba^T.
// u_ab and v_ba live on I_a; u_ba and v_ab live on I_b.
struct HodlrPair {
  DenseMatrix u_ab, v_ab;
  std::vector<double> s_ab;
  DenseMatrix u_ba, v_ba;
  std::vector<double> s_ba;
};

struct HodlrMatrix {
  IndexTree tree;
  // Indexed by tree node; entries of leaves stay empty.
  std::vector<HodlrPair> pairs;
  // Indexed by tree node; only leaves hold a block.
  std::vector<DenseMatrix> diag;
  // Sibling levels 1..built_levels are present.
  int built_levels = 0;
  bool has_diagonal = false;

  Index size() const { return tree.size(); }
};

struct HodlrOptions {
  Index samples = 0;  // sample width per child and level
  double eps = 0.0;   // SVD truncation threshold
  bool relative = false;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;
};

HodlrMatrix hodlr_compress(const LinearOracle& oracle, const IndexTree& tree, const HodlrOptions& opts);

DenseMatrix hodlr_apply(const HodlrMatrix& h, const DenseMatrix& x, bool adjoint = false,
                        Exec exec = Exec::parallel);
// Applies A^(level): the sibling blocks whose children sit on levels
// 1..level, without the leaf diagonal.
DenseMatrix hodlr_apply_truncated(const HodlrMatrix& h, int level, const DenseMatrix& x, bool adjoint = false,
                                  Exec exec = Exec::parallel);

std::int64_t hodlr_storage_bytes(const HodlrMatrix& h);
Index hodlr_max_rank(const HodlrMatrix& h);

// Columns sent to A and to A^T by hodlr_compress.
Index hodlr_apply_count(const IndexTree& tree, Index samples);
Index hodlr_adjoint_count(const IndexTree& tree, Index samples);

}  // namespace rsmat
