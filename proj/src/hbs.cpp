#include "rsmat/hbs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rsmat/linalg.hpp"
#include "sampling.hpp"

namespace rsmat {

namespace {

// Long bases standing in for the transfers of the non-leaf nodes on one
// level; used while the levels below are still being compressed.
struct Frontier {
  const std::vector<DenseMatrix>* u = nullptr;
  const std::vector<DenseMatrix>* v = nullptr;
  int level = -1;
};

DenseMatrix scaled_columns(ConstMatrixView a, const std::vector<double>& w) {
  DenseMatrix out = DenseMatrix::copy_of(a);
  scale_columns(out.view(), w);
  return out;
}

DenseMatrix scaled_rows(ConstMatrixView a, const std::vector<double>& w) {
  DenseMatrix out = DenseMatrix::copy_of(a);
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i) out(i, j) *= w[static_cast<std::size_t>(j)];
  return out;
}

DenseMatrix nested_apply(const IndexTree& tree, const std::vector<NestedNode>& nodes, int level, const DenseMatrix& x,
                         bool adjoint, bool with_diag, const Frontier& front, Exec exec) {
  DenseMatrix y(x.rows(), x.cols());
  const auto count = static_cast<std::size_t>(tree.node_count());
  auto at = [](int t) { return static_cast<std::size_t>(t); };
  auto is_front = [&](int t) {
    const auto& nd = tree.node(t);
    return front.u != nullptr && nd.level == front.level && !nd.is_leaf();
  };
  // The adjoint reads the bases with their roles swapped.
  auto in_basis = [&](int t) -> const DenseMatrix& {
    if (is_front(t)) return adjoint ? (*front.u)[at(t)] : (*front.v)[at(t)];
    return adjoint ? nodes[at(t)].u : nodes[at(t)].v;
  };
  auto out_basis = [&](int t) -> const DenseMatrix& {
    if (is_front(t)) return adjoint ? (*front.v)[at(t)] : (*front.u)[at(t)];
    return adjoint ? nodes[at(t)].v : nodes[at(t)].u;
  };

  if (level > 0 && x.cols() > 0) {
    const int deepest = front.u != nullptr ? front.level : tree.depth();
    const Index s = x.cols();
    std::vector<DenseMatrix> q(count), uh(count);

    for (int lv = deepest; lv >= 1; --lv) {
      const auto& ids = tree.nodes_on_level(lv);
      for_each_index(exec, static_cast<Index>(ids.size()), [&](Index i) {
        const int t = ids[static_cast<std::size_t>(i)];
        const auto& nd = tree.node(t);
        if (is_front(t) || nd.is_leaf())
          q[at(t)] = matmul(in_basis(t), x.row_range(nd.begin, nd.size()), Op::trans, Op::none);
        else
          q[at(t)] = matmul(in_basis(t), vstack(q[at(nd.left)], q[at(nd.right)]), Op::trans, Op::none);
        uh[at(t)] = DenseMatrix(out_basis(t).cols(), s);
      });
    }

    for (int lv = 0; lv < level; ++lv) {
      const std::vector<int> parents = tree.parents_on_level(lv);
      for_each_index(exec, static_cast<Index>(parents.size()), [&](Index i) {
        const int t = parents[static_cast<std::size_t>(i)];
        const auto& nd = tree.node(t);
        const NestedNode& f = nodes[at(t)];
        const Op op = adjoint ? Op::trans : Op::none;
        gemm(op, Op::none, 1.0, adjoint ? f.b_ba : f.b_ab, q[at(nd.right)], 1.0, uh[at(nd.left)].view());
        gemm(op, Op::none, 1.0, adjoint ? f.b_ab : f.b_ba, q[at(nd.left)], 1.0, uh[at(nd.right)].view());
      });
    }

    for (int lv = 1; lv <= deepest; ++lv) {
      const auto& ids = tree.nodes_on_level(lv);
      for_each_index(exec, static_cast<Index>(ids.size()), [&](Index i) {
        const int t = ids[static_cast<std::size_t>(i)];
        const auto& nd = tree.node(t);
        if (is_front(t) || nd.is_leaf()) {
          gemm(Op::none, Op::none, 1.0, out_basis(t), uh[at(t)], 1.0, y.row_range(nd.begin, nd.size()));
          return;
        }
        const DenseMatrix down = matmul(out_basis(t), uh[at(t)]);
        const Index ra = uh[at(nd.left)].rows();
        add_into(down.row_range(0, ra), uh[at(nd.left)].view());
        add_into(down.row_range(ra, down.rows() - ra), uh[at(nd.right)].view());
      });
    }
  }

  if (with_diag) {
    const auto& leaves = tree.leaves();
    for_each_index(exec, static_cast<Index>(leaves.size()), [&](Index i) {
      const int t = leaves[static_cast<std::size_t>(i)];
      const auto& nd = tree.node(t);
      gemm(adjoint ? Op::trans : Op::none, Op::none, 1.0, nodes[at(t)].d, x.row_range(nd.begin, nd.size()), 1.0,
           y.row_range(nd.begin, nd.size()));
    });
  }
  return y;
}

void check_input(const IndexTree& tree, const DenseMatrix& x) {
  if (x.rows() != tree.size()) throw std::invalid_argument("hbs_apply: input row count does not match N");
}

void check_level(const IndexTree& tree, int level) {
  if (level < 0 || level > tree.depth()) throw std::out_of_range("hbs_apply_truncated: level out of range");
}

// Interpolative decomposition of the rows of basis * diag(w), as used by the
// HBS-ID conversion. Produces the transposed interpolation matrix (rows of
// basis x k), the selected candidates in ascending order, and the selected
// rows of basis.
void skeletonize(const DenseMatrix& basis, const std::vector<double>& w, const std::vector<Index>& candidates,
                 double eps, DenseMatrix& interp, std::vector<Index>& skel, DenseMatrix& sampled) {
  const Index rows = basis.rows(), r = basis.cols();
  const bool zero = std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; });
  if (rows == 0 || r == 0 || zero) {
    interp = DenseMatrix(rows, 0);
    skel.clear();
    sampled = DenseMatrix(0, r);
    return;
  }
  const DenseMatrix weighted_t = scaled_columns(basis, w).transposed();
  const IdResult id = id_decompose(weighted_t, Tolerance{eps});
  const Index k = id.rank;
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return id.pivots[static_cast<std::size_t>(a)] < id.pivots[static_cast<std::size_t>(b)];
  });
  interp = DenseMatrix(rows, k);
  std::vector<Index> local(static_cast<std::size_t>(k));
  skel.resize(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    for (Index j = 0; j < rows; ++j) interp(j, i) = id.x(src, j);
    local[static_cast<std::size_t>(i)] = id.pivots[static_cast<std::size_t>(src)];
    skel[static_cast<std::size_t>(i)] = candidates[static_cast<std::size_t>(local[static_cast<std::size_t>(i)])];
  }
  sampled = select_rows(basis, local);
}

std::int64_t node_scalars(const NestedNode& n) {
  return n.u.size() + n.v.size() + n.b_ab.size() + n.b_ba.size() + n.d.size();
}

}  // namespace

Index hbs_apply_count(const IndexTree& tree, Index rank) {
  return static_cast<Index>(tree.depth()) * 2 * rank + tree.max_leaf_size();
}

Index hbs_adjoint_count(const IndexTree& tree, Index rank) { return static_cast<Index>(tree.depth()) * 2 * rank; }

HbsMatrix hbs_compress(const LinearOracle& oracle, const IndexTree& tree, const HbsOptions& opts) {
  if (oracle.dim() != tree.size()) throw std::invalid_argument("hbs_compress: oracle dimension differs from tree size");
  if (opts.rank < 1) throw std::invalid_argument("hbs_compress: sample rank must be positive");

  const Index s = opts.rank;
  const auto count = static_cast<std::size_t>(tree.node_count());
  auto at = [](int t) { return static_cast<std::size_t>(t); };
  HbsMatrix h;
  h.tree = tree;
  h.nodes.resize(count);
  h.y.resize(count);
  h.z.resize(count);
  if (opts.debug_long_bases) {
    h.long_u.resize(count);
    h.long_v.resize(count);
  }

  std::vector<DenseMatrix> cur_u(count), cur_v(count);
  for (int level = 0; level < tree.depth(); ++level) {
    const std::vector<int> parents = tree.parents_on_level(level);
    const auto np = static_cast<Index>(parents.size());
    const Frontier front{&cur_u, &cur_v, level};
    std::vector<DenseMatrix> next_u(count), next_v(count);

    const DenseMatrix omega = detail::level_probe(tree, parents, s, opts.seed, level, opts.exec);
    DenseMatrix y = oracle.apply(omega);
    add_into(nested_apply(h.tree, h.nodes, level, omega, false, false, front, opts.exec), y.view(), -1.0);

    // Row side: each child's local sample joins the fresh columns with the
    // parent's long basis restricted to the child, weighted by y(parent).
    DenseMatrix omega2(tree.size(), 2 * s);
    for_each_index(opts.exec, np, [&](Index p) {
      const int t = parents[static_cast<std::size_t>(p)];
      const auto& nd = tree.node(t);
      const bool root = nd.parent < 0;
      auto local_basis = [&](int c, int o, Index col) {
        const auto& ch = tree.node(c);
        DenseMatrix loc = DenseMatrix::copy_of(y.block(ch.begin, col, ch.size(), std::min(s, tree.node(o).size())));
        if (!root)
          loc = hstack(loc, scaled_columns(cur_u[at(t)].row_range(tree.offset_in_parent(c), ch.size()), h.y[at(t)]));
        SvdResult f = svd(loc, FixedRank{std::min({s, loc.rows(), loc.cols()})});
        detail::zero_small(f.s, 1e-14);
        next_u[at(c)] = std::move(f.u);
        h.y[at(c)] = std::move(f.s);
      };
      local_basis(nd.left, nd.right, s);
      local_basis(nd.right, nd.left, 0);
      const auto& a = tree.node(nd.left);
      const auto& b = tree.node(nd.right);
      const DenseMatrix& ua = next_u[at(nd.left)];
      const DenseMatrix& ub = next_u[at(nd.right)];
      if (!root) {
        h.nodes[at(t)].u = vstack(matmul(ua, cur_u[at(t)].row_range(0, a.size()), Op::trans, Op::none),
                                  matmul(ub, cur_u[at(t)].row_range(a.size(), b.size()), Op::trans, Op::none));
      }
      copy_into(ua, omega2.block(a.begin, 0, a.size(), ua.cols()));
      copy_into(ub, omega2.block(b.begin, s, b.size(), ub.cols()));
    });

    DenseMatrix z = oracle.apply_adjoint(omega2);
    add_into(nested_apply(h.tree, h.nodes, level, omega2, true, false, front, opts.exec), z.view(), -1.0);

    // Column side; the right singular vectors of each local sample carry the
    // sibling coupling.
    for_each_index(opts.exec, np, [&](Index p) {
      const int t = parents[static_cast<std::size_t>(p)];
      const auto& nd = tree.node(t);
      const bool root = nd.parent < 0;
      auto local_basis = [&](int c, int o, Index col) {
        const auto& ch = tree.node(c);
        const Index ro = next_u[at(o)].cols();
        DenseMatrix loc = DenseMatrix::copy_of(z.block(ch.begin, col, ch.size(), ro));
        if (!root)
          loc = hstack(loc, scaled_columns(cur_v[at(t)].row_range(tree.offset_in_parent(c), ch.size()), h.z[at(t)]));
        SvdResult f = svd(loc, FixedRank{std::min({s, loc.rows(), loc.cols()})});
        detail::zero_small(f.s, 1e-14);
        // z(I_c, fresh) = A(I_o, I_c)^T U_long(o)  =>  A(I_o, I_c) ~= U_long(o) X(0:ro, :) diag(s) V_long(c)^T
        DenseMatrix coupling = scaled_rows(f.v.row_range(0, ro), f.s);
        next_v[at(c)] = std::move(f.u);
        h.z[at(c)] = std::move(f.s);
        return coupling;
      };
      h.nodes[at(t)].b_ba = local_basis(nd.left, nd.right, s);
      h.nodes[at(t)].b_ab = local_basis(nd.right, nd.left, 0);
      const auto& a = tree.node(nd.left);
      const auto& b = tree.node(nd.right);
      if (!root) {
        h.nodes[at(t)].v =
            vstack(matmul(next_v[at(nd.left)], cur_v[at(t)].row_range(0, a.size()), Op::trans, Op::none),
                   matmul(next_v[at(nd.right)], cur_v[at(t)].row_range(a.size(), b.size()), Op::trans, Op::none));
      }
      for (int c : {nd.left, nd.right}) {
        if (tree.node(c).is_leaf()) {
          h.nodes[at(c)].u = next_u[at(c)];
          h.nodes[at(c)].v = next_v[at(c)];
        }
        if (opts.debug_long_bases) {
          h.long_u[at(c)] = next_u[at(c)];
          h.long_v[at(c)] = next_v[at(c)];
        }
      }
    });

    cur_u = std::move(next_u);
    cur_v = std::move(next_v);
    h.built_levels = level + 1;
  }

  const DenseMatrix omega = detail::leaf_probe(tree);
  DenseMatrix y = oracle.apply(omega);
  add_into(nested_apply(h.tree, h.nodes, tree.depth(), omega, false, false, Frontier{}, opts.exec), y.view(), -1.0);
  for (int t : tree.leaves()) {
    const auto& nd = tree.node(t);
    h.nodes[at(t)].d = DenseMatrix::copy_of(y.block(nd.begin, 0, nd.size(), nd.size()));
  }
  h.has_diagonal = true;
  return h;
}

DenseMatrix hbs_apply(const HbsMatrix& h, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h.tree, x);
  if (h.built_levels != h.tree.depth() || !h.has_diagonal)
    throw std::invalid_argument("hbs_apply: matrix is only partially built");
  return nested_apply(h.tree, h.nodes, h.tree.depth(), x, adjoint, true, Frontier{}, exec);
}

DenseMatrix hbs_apply(const HbsIdMatrix& h, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h.tree, x);
  return nested_apply(h.tree, h.nodes, h.tree.depth(), x, adjoint, true, Frontier{}, exec);
}

DenseMatrix hbs_apply_truncated(const HbsMatrix& h, int level, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h.tree, x);
  check_level(h.tree, level);
  if (level > h.built_levels) throw std::invalid_argument("hbs_apply_truncated: level not yet compressed");
  if (h.built_levels == h.tree.depth())
    return nested_apply(h.tree, h.nodes, level, x, adjoint, false, Frontier{}, exec);
  // Partially built: the levels below are missing, so the long bases of the
  // deepest compressed level must have been retained.
  if (h.long_u.empty()) throw std::invalid_argument("hbs_apply_truncated: partial matrix without retained long bases");
  return nested_apply(h.tree, h.nodes, level, x, adjoint, false, Frontier{&h.long_u, &h.long_v, level}, exec);
}

DenseMatrix hbs_apply_truncated(const HbsIdMatrix& h, int level, const DenseMatrix& x, bool adjoint, Exec exec) {
  check_input(h.tree, x);
  check_level(h.tree, level);
  return nested_apply(h.tree, h.nodes, level, x, adjoint, false, Frontier{}, exec);
}

HbsIdMatrix hbs_to_hbsid(const HbsMatrix& h, double eps, Exec exec) {
  if (h.built_levels != h.tree.depth() || !h.has_diagonal)
    throw std::invalid_argument("hbs_to_hbsid: matrix is only partially built");
  if (!(eps > 0.0)) throw std::invalid_argument("hbs_to_hbsid: tolerance must be positive");
  const IndexTree& tree = h.tree;
  const auto count = static_cast<std::size_t>(tree.node_count());
  auto at = [](int t) { return static_cast<std::size_t>(t); };
  if (h.y.size() != count || h.z.size() != count) throw std::invalid_argument("hbs_to_hbsid: missing sample weights");
  for (int t = 1; t < tree.node_count(); ++t)
    if (h.y[at(t)].size() != static_cast<std::size_t>(h.nodes[at(t)].u.cols()) ||
        h.z[at(t)].size() != static_cast<std::size_t>(h.nodes[at(t)].v.cols()))
      throw std::invalid_argument("hbs_to_hbsid: missing sample weights");

  HbsIdMatrix out;
  out.tree = tree;
  out.nodes.resize(count);
  out.skel_in.resize(count);
  out.skel_out.resize(count);
  std::vector<DenseMatrix> usamp(count), vsamp(count);

  const auto& leaves = tree.leaves();
  for_each_index(exec, static_cast<Index>(leaves.size()), [&](Index i) {
    const int t = leaves[static_cast<std::size_t>(i)];
    const auto& nd = tree.node(t);
    out.nodes[at(t)].d = h.nodes[at(t)].d;
    if (nd.parent < 0) return;
    std::vector<Index> cand(static_cast<std::size_t>(nd.size()));
    std::iota(cand.begin(), cand.end(), nd.begin);
    skeletonize(h.nodes[at(t)].u, h.y[at(t)], cand, eps, out.nodes[at(t)].u, out.skel_in[at(t)], usamp[at(t)]);
    skeletonize(h.nodes[at(t)].v, h.z[at(t)], cand, eps, out.nodes[at(t)].v, out.skel_out[at(t)], vsamp[at(t)]);
  });

  for (int level = tree.depth() - 1; level >= 0; --level) {
    const std::vector<int> parents = tree.parents_on_level(level);
    for_each_index(exec, static_cast<Index>(parents.size()), [&](Index i) {
      const int t = parents[static_cast<std::size_t>(i)];
      const auto& nd = tree.node(t);
      const auto a = at(nd.left), b = at(nd.right);
      const NestedNode& src = h.nodes[at(t)];
      NestedNode& dst = out.nodes[at(t)];
      dst.b_ab = matmul(matmul(usamp[a], src.b_ab), vsamp[b], Op::none, Op::trans);
      dst.b_ba = matmul(matmul(usamp[b], src.b_ba), vsamp[a], Op::none, Op::trans);
      if (nd.parent < 0) return;
      auto joined = [](const std::vector<Index>& l, const std::vector<Index>& r) {
        std::vector<Index> c(l);
        c.insert(c.end(), r.begin(), r.end());
        return c;
      };
      skeletonize(matmul(block_diag(usamp[a], usamp[b]), src.u), h.y[at(t)], joined(out.skel_in[a], out.skel_in[b]),
                  eps, dst.u, out.skel_in[at(t)], usamp[at(t)]);
      skeletonize(matmul(block_diag(vsamp[a], vsamp[b]), src.v), h.z[at(t)],
                  joined(out.skel_out[a], out.skel_out[b]), eps, dst.v, out.skel_out[at(t)], vsamp[at(t)]);
    });
  }
  return out;
}

DenseMatrix hbs_long_basis(const IndexTree& tree, const std::vector<NestedNode>& nodes, int t, bool column_side) {
  const auto& nd = tree.node(t);
  if (nd.parent < 0) throw std::invalid_argument("hbs_long_basis: the root has no basis");
  const NestedNode& f = nodes[static_cast<std::size_t>(t)];
  const DenseMatrix& own = column_side ? f.v : f.u;
  if (nd.is_leaf()) return own;
  return matmul(block_diag(hbs_long_basis(tree, nodes, nd.left, column_side),
                           hbs_long_basis(tree, nodes, nd.right, column_side)),
                own);
}

std::int64_t hbs_storage_bytes(const HbsMatrix& h) {
  std::int64_t scalars = 0;
  for (const auto& n : h.nodes) scalars += node_scalars(n);
  for (const auto& v : h.y) scalars += static_cast<std::int64_t>(v.size());
  for (const auto& v : h.z) scalars += static_cast<std::int64_t>(v.size());
  return scalars * static_cast<std::int64_t>(sizeof(double));
}

std::int64_t hbs_storage_bytes(const HbsIdMatrix& h) {
  std::int64_t scalars = 0;
  for (const auto& n : h.nodes) scalars += node_scalars(n);
  for (const auto& v : h.skel_in) scalars += static_cast<std::int64_t>(v.size());
  for (const auto& v : h.skel_out) scalars += static_cast<std::int64_t>(v.size());
  return scalars * 8;
}

Index hbs_max_rank(const HbsMatrix& h) {
  Index k = 0;
  for (const auto& n : h.nodes) k = std::max({k, n.u.cols(), n.v.cols()});
  return k;
}

Index hbs_max_rank(const HbsIdMatrix& h) {
  Index k = 0;
  for (std::size_t t = 0; t < h.skel_in.size(); ++t)
    k = std::max({k, static_cast<Index>(h.skel_in[t].size()), static_cast<Index>(h.skel_out[t].size())});
  return k;
}

}  // namespace rsmat
