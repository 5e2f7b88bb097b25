#pragma once
//
// HBS matrices (nested bases) and their interpolative variant HBS-ID.
//
// Both formats share one node layout. A leaf holds its basis matrices
// directly; a non-leaf, non-root node holds short transfer matrices whose
// rows stack the ranks of its two children, so that
//
//   U_long(tau) = diag(U_long(a), U_long(b)) * u(tau).
//
// A non-leaf node also stores the couplings of its two children:
//
//   A(I_a, I_b) ~= U_long(a) b_ab V_long(b)^T,   A(I_b, I_a) ~= U_long(b) b_ba V_long(a)^T.
//
// The root has no basis. Leaves carry the dense diagonal block d.
//

#include <cstdint>
#include <vector>

#include "rsmat/dense.hpp"
#include "rsmat/index_tree.hpp"
#include "rsmat/oracle.hpp"
#include "rsmat/parallel.hpp"

namespace rsmat {

struct NestedNode {
  DenseMatrix u, v;
  DenseMatrix b_ab, b_ba;
  DenseMatrix d;
};

struct HbsMatrix {
  IndexTree tree;
  std::vector<NestedNode> nodes;
  // Singular values retained with each node's long bases: U_long(tau) diag(y)
  // spans the sampled row block of tau, V_long(tau) diag(z) the column block.
  std::vector<std::vector<double>> y, z;
  int built_levels = 0;
  bool has_diagonal = false;
  // Long bases of every non-root node; filled only in debug mode.
  std::vector<DenseMatrix> long_u, long_v;

  Index size() const { return tree.size(); }
};

struct HbsIdMatrix {
  IndexTree tree;
  // u/v are the transposed interpolation matrices: each contains an exact
  // identity at the rows of the node's skeleton within its candidate list
  // (I_tau for a leaf, the children's skeletons stacked for a parent).
  // b_ab, b_ba approximate A(skel_in(a), skel_out(b)) and A(skel_in(b), skel_out(a)).
  std::vector<NestedNode> nodes;
  // Global row / column skeletons, sorted ascending.
  std::vector<std::vector<Index>> skel_in, skel_out;

  Index size() const { return tree.size(); }
};

struct HbsOptions {
  Index rank = 0;  // fixed sample rank r
  std::uint64_t seed = 0;
  bool debug_long_bases = false;
  Exec exec = Exec::parallel;
};

HbsMatrix hbs_compress(const LinearOracle& oracle, const IndexTree& tree, const HbsOptions& opts);

DenseMatrix hbs_apply(const HbsMatrix& h, const DenseMatrix& x, bool adjoint = false, Exec exec = Exec::parallel);
DenseMatrix hbs_apply(const HbsIdMatrix& h, const DenseMatrix& x, bool adjoint = false,
                      Exec exec = Exec::parallel);
// Applies A^(level) through the nested bases; no leaf diagonal.
DenseMatrix hbs_apply_truncated(const HbsMatrix& h, int level, const DenseMatrix& x, bool adjoint = false,
                                Exec exec = Exec::parallel);
DenseMatrix hbs_apply_truncated(const HbsIdMatrix& h, int level, const DenseMatrix& x, bool adjoint = false,
                                Exec exec = Exec::parallel);

// eps is relative to the weighted sample block of each node.
HbsIdMatrix hbs_to_hbsid(const HbsMatrix& h, double eps, Exec exec = Exec::parallel);

// U_long / V_long of node t rebuilt from the leaf bases and transfers.
DenseMatrix hbs_long_basis(const IndexTree& tree, const std::vector<NestedNode>& nodes, int t, bool column_side);

std::int64_t hbs_storage_bytes(const HbsMatrix& h);
std::int64_t hbs_storage_bytes(const HbsIdMatrix& h);
Index hbs_max_rank(const HbsMatrix& h);
Index hbs_max_rank(const HbsIdMatrix& h);

Index hbs_apply_count(const IndexTree& tree, Index rank);
Index hbs_adjoint_count(const IndexTree& tree, Index rank);

}  // namespace rsmat
