#include "rsmat/hodlr.hpp"

#include <algorithm>
#include <stdexcept>

#include "rsmat/linalg.hpp"
#include "sampling.hpp"

namespace rsmat {

namespace {

void check_input(const HodlrMatrix& h, const DenseMatrix& x) {
  if (x.rows() != h.size()) throw std::invalid_argument("hodlr_apply: input row count does not match N");
}

// y(I_rows) += u diag(s) (v^T x(I_cols))
void add_lowrank(const DenseMatrix& u, const std::vector<double>& s, const DenseMatrix& v,
                 const IndexTree::Node& rows, const IndexTree::Node& cols, const DenseMatrix& x, DenseMatrix& y) {
  if (s.empty() || x.cols() == 0) return;
  DenseMatrix t = matmul(v, x.row_range(cols.begin, cols.size()), Op::trans, Op::none);
  for (Index j = 0; j < t.cols(); ++j)
    for (Index i = 0; i < t.rows(); ++i) t(i, j) *= s[static_cast<std::size_t>(i)];
  gemm(Op::none, Op::none, 1.0, u, t, 1.0, y.row_range(rows.begin, rows.size()));
}

// Factors A(I_rows, I_cols) from Z = A(I_rows, I_cols)^T u with u orthonormal:
// Z = V S W^T gives A(I_rows, I_cols) ~= (u W) S V^T.
void split_block(const DenseMatrix& u, ConstMatrixView z, const FactorizationMode& mode, DenseMatrix& u_out,
                 std::vector<double>& s_out, DenseMatrix& v_out) {
  if (u.cols() == 0 || z.rows == 0) {
    u_out = DenseMatrix(u.rows(), 0);
    s_out.clear();
    v_out = DenseMatrix(z.rows, 0);
    return;
  }
  SvdResult f = svd(z, mode);
  u_out = matmul(u, f.v);
  s_out = std::move(f.s);
  v_out = std::move(f.u);
}

}  // namespace

Index hodlr_apply_count(const IndexTree& tree, Index samples) {
  return static_cast<Index>(tree.depth()) * 2 * samples + tree.max_leaf_size();
}

Index hodlr_adjoint_count(const IndexTree& tree, Index samples) {
  return static_cast<Index>(tree.depth()) * 2 * samples;
}

HodlrMatrix hodlr_compress(const LinearOracle& oracle, const IndexTree& tree, const HodlrOptions& opts) {
  if (oracle.dim() != tree.size()) throw std::invalid_argument("hodlr_compress: oracle dimension differs from tree size");
  if (opts.samples < 1) throw std::invalid_argument("hodlr_compress: sample width must be positive");
  if (!(opts.eps > 0.0)) throw std::invalid_argument("hodlr_compress: tolerance must be positive");

  const Index s = opts.samples;
  const FactorizationMode mode = Tolerance{opts.eps, opts.relative};
  HodlrMatrix h;
  h.tree = tree;
  h.pairs.resize(static_cast<std::size_t>(tree.node_count()));
  h.diag.resize(static_cast<std::size_t>(tree.node_count()));

  for (int level = 0; level < tree.depth(); ++level) {
    const std::vector<int> parents = tree.parents_on_level(level);
    const auto np = static_cast<Index>(parents.size());

    const DenseMatrix omega = detail::level_probe(tree, parents, s, opts.seed, level, opts.exec);
    DenseMatrix y = oracle.apply(omega);
    add_into(hodlr_apply_truncated(h, level, omega, false, opts.exec), y.view(), -1.0);

    // Column bases from the samples; left children were hit through the right probes and vice versa.
    std::vector<DenseMatrix> ua(static_cast<std::size_t>(np)), ub(static_cast<std::size_t>(np));
    DenseMatrix omega2(tree.size(), 2 * s);
    for_each_index(opts.exec, np, [&](Index p) {
      const auto& nd = tree.node(parents[static_cast<std::size_t>(p)]);
      const auto& a = tree.node(nd.left);
      const auto& b = tree.node(nd.right);
      const auto pp = static_cast<std::size_t>(p);
      ua[pp] = orthonormal_basis(y.block(a.begin, s, a.size(), std::min(s, b.size())));
      ub[pp] = orthonormal_basis(y.block(b.begin, 0, b.size(), std::min(s, a.size())));
      copy_into(ua[pp], omega2.block(a.begin, 0, a.size(), ua[pp].cols()));
      copy_into(ub[pp], omega2.block(b.begin, s, b.size(), ub[pp].cols()));
    });

    DenseMatrix z = oracle.apply_adjoint(omega2);
    add_into(hodlr_apply_truncated(h, level, omega2, true, opts.exec), z.view(), -1.0);

    for_each_index(opts.exec, np, [&](Index p) {
      const int t = parents[static_cast<std::size_t>(p)];
      const auto& nd = tree.node(t);
      const auto& a = tree.node(nd.left);
      const auto& b = tree.node(nd.right);
      const auto pp = static_cast<std::size_t>(p);
      HodlrPair& pair = h.pairs[static_cast<std::size_t>(t)];
      // z(I_b, 0:ka) = A(I_a, I_b)^T ua ; z(I_a, s:s+kb) = A(I_b, I_a)^T ub
      split_block(ua[pp], z.block(b.begin, 0, b.size(), ua[pp].cols()), mode, pair.u_ab, pair.s_ab, pair.v_ab);
      split_block(ub[pp], z.block(a.begin, s, a.size(), ub[pp].cols()), mode, pair.u_ba, pair.s_ba, pair.v_ba);
    });
    h.built_levels = level + 1;
  }

  const DenseMatrix omega = detail::leaf_probe(tree);
  DenseMatrix y = oracle.apply(omega);
  add_into(hodlr_apply_truncated(h, tree.depth(), omega, false, opts.exec), y.view(), -1.0);
  for (int t : tree.leaves()) {
    const auto& nd = tree.node(t);
    h.diag[static_cast<std::size_t>(t)] = DenseMatrix::copy_of(y.block(nd.begin, 0, nd.size(), nd.size()));
  }
  h.has_diagonal = true;
  return h;
}

DenseMatrix hodlr_apply_truncated(const HodlrMatrix& h, int level, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h, x);
  if (level < 0 || level > h.tree.depth()) throw std::out_of_range("hodlr_apply_truncated: level out of range");
  if (level > h.built_levels) throw std::invalid_argument("hodlr_apply_truncated: level not yet compressed");
  DenseMatrix y(x.rows(), x.cols());
  for (int lv = 0; lv < level; ++lv) {
    const std::vector<int> parents = h.tree.parents_on_level(lv);
    // Distinct parents on one level touch disjoint rows of y.
    for_each_index(exec, static_cast<Index>(parents.size()), [&](Index p) {
      const int t = parents[static_cast<std::size_t>(p)];
      const auto& nd = h.tree.node(t);
      const auto& a = h.tree.node(nd.left);
      const auto& b = h.tree.node(nd.right);
      const HodlrPair& f = h.pairs[static_cast<std::size_t>(t)];
      if (!adjoint) {
        add_lowrank(f.u_ab, f.s_ab, f.v_ab, a, b, x, y);
        add_lowrank(f.u_ba, f.s_ba, f.v_ba, b, a, x, y);
      } else {
        add_lowrank(f.v_ba, f.s_ba, f.u_ba, a, b, x, y);
        add_lowrank(f.v_ab, f.s_ab, f.u_ab, b, a, x, y);
      }
    });
  }
  return y;
}

DenseMatrix hodlr_apply(const HodlrMatrix& h, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h, x);
  if (h.built_levels != h.tree.depth() || !h.has_diagonal)
    throw std::invalid_argument("hodlr_apply: matrix is only partially built");
  DenseMatrix y = hodlr_apply_truncated(h, h.tree.depth(), x, adjoint, exec);
  const auto& leaves = h.tree.leaves();
  for_each_index(exec, static_cast<Index>(leaves.size()), [&](Index i) {
    const int t = leaves[static_cast<std::size_t>(i)];
    const auto& nd = h.tree.node(t);
    gemm(adjoint ? Op::trans : Op::none, Op::none, 1.0, h.diag[static_cast<std::size_t>(t)],
         x.row_range(nd.begin, nd.size()), 1.0, y.row_range(nd.begin, nd.size()));
  });
  return y;
}

std::int64_t hodlr_storage_bytes(const HodlrMatrix& h) {
  std::int64_t scalars = 0;
  for (const auto& p : h.pairs) {
    scalars += p.u_ab.size() + p.v_ab.size() + p.u_ba.size() + p.v_ba.size();
    scalars += static_cast<std::int64_t>(p.s_ab.size() + p.s_ba.size());
  }
  for (const auto& d : h.diag) scalars += d.size();
  return scalars * static_cast<std::int64_t>(sizeof(double));
}

Index hodlr_max_rank(const HodlrMatrix& h) {
  Index k = 0;
  for (const auto& p : h.pairs)
    k = std::max({k, static_cast<Index>(p.s_ab.size()), static_cast<Index>(p.s_ba.size())});
  return k;
}

}  // namespace rsmat
