#include "rsmat/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rsmat {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

InvariantCheck at_most(std::string name, double measured, double threshold) {
  InvariantCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.passed = measured <= threshold;  // NaN fails
  c.detail = "max defect " + fmt("%.3e", measured) + " (limit " + fmt("%.1e", threshold) + ")";
  return c;
}

InvariantCheck holds(std::string name, bool ok, std::string detail) {
  InvariantCheck c;
  c.name = std::move(name);
  c.passed = ok;
  c.measured = ok ? 0.0 : 1.0;
  c.detail = std::move(detail);
  return c;
}

// Shape check first: the remaining checks index blocks by the tree and are
// only meaningful once the shapes agree.
template <class M>
bool shapes_ok(const M& m, ValidationReport& r) {
  try {
    check_shapes(m);
    r.checks.push_back(holds("block_shapes", true, "all blocks consistent with the tree"));
    return true;
  } catch (const FormatError& e) {
    r.checks.push_back(holds("block_shapes", false, e.what()));
    return false;
  }
}

bool finite_values(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Nonnegative and nonincreasing.
bool sorted_weights(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) return false;
    if (i > 0 && v[i] > v[i - 1]) return false;
  }
  return true;
}

std::string first_bad(const char* what, int t) { return std::string(what) + " at node " + std::to_string(t); }

void nested_common(const IndexTree& tree, const std::vector<NestedNode>& nodes, ValidationReport& r) {
  bool finite = true;
  int bad = -1;
  for (int t = 0; t < tree.node_count() && finite; ++t) {
    const NestedNode& n = nodes[static_cast<std::size_t>(t)];
    for (const DenseMatrix* m : {&n.u, &n.v, &n.b_ab, &n.b_ba, &n.d})
      if (!all_finite(*m)) {
        finite = false;
        bad = t;
      }
  }
  r.checks.push_back(holds("finite_entries", finite, finite ? "all entries finite" : first_bad("non-finite entry", bad)));
}

std::vector<Index> candidates(const IndexTree& tree, const std::vector<std::vector<Index>>& skel, int t) {
  const auto& nd = tree.node(t);
  std::vector<Index> c;
  if (nd.is_leaf()) {
    for (Index i = nd.begin; i < nd.end; ++i) c.push_back(i);
  } else {
    c = skel[static_cast<std::size_t>(nd.left)];
    const auto& b = skel[static_cast<std::size_t>(nd.right)];
    c.insert(c.end(), b.begin(), b.end());
  }
  return c;
}

bool identity_rows(const DenseMatrix& x, const std::vector<Index>& cand, const std::vector<Index>& skel) {
  for (std::size_t i = 0; i < skel.size(); ++i) {
    const auto it = std::find(cand.begin(), cand.end(), skel[i]);
    if (it == cand.end()) return false;
    const auto p = static_cast<Index>(it - cand.begin());
    for (Index j = 0; j < x.cols(); ++j)
      if (x(p, j) != (j == static_cast<Index>(i) ? 1.0 : 0.0)) return false;
  }
  return true;
}

bool subset_of(const std::vector<Index>& s, const std::vector<Index>& a, const std::vector<Index>& b) {
  return std::all_of(s.begin(), s.end(), [&](Index i) {
    return std::binary_search(a.begin(), a.end(), i) || std::binary_search(b.begin(), b.end(), i);
  });
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

double weighted_orthonormality_defect(ConstMatrixView q, const std::vector<double>& w) {
  if (q.cols == 0) return 0.0;
  const double top = *std::max_element(w.begin(), w.end());
  if (!(top > 0.0)) return 0.0;
  const DenseMatrix g = matmul(q, q, Op::trans, Op::none);
  double worst = 0.0;
  for (Index j = 0; j < g.cols(); ++j)
    for (Index i = 0; i < g.rows(); ++i) {
      const double d = std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) * (w[static_cast<std::size_t>(i)] / top) *
                       (w[static_cast<std::size_t>(j)] / top);
      if (!(d <= worst)) worst = d;  // keeps NaN
    }
  return worst;
}

ValidationReport validate(const HodlrMatrix& h) {
  ValidationReport r;
  if (!shapes_ok(h, r)) return r;
  double ortho = 0.0;
  bool finite = true, sorted = true;
  int bad_sorted = -1;
  for (int t = 0; t < h.tree.node_count(); ++t) {
    const auto& p = h.pairs[static_cast<std::size_t>(t)];
    for (const DenseMatrix* m : {&p.u_ab, &p.v_ab, &p.u_ba, &p.v_ba}) {
      finite = finite && all_finite(*m);
      if (m->cols() > 0) ortho = std::max(ortho, orthonormality_defect(*m));
    }
    finite = finite && finite_values(p.s_ab) && finite_values(p.s_ba) && all_finite(h.diag[static_cast<std::size_t>(t)]);
    if (sorted && !(sorted_weights(p.s_ab) && sorted_weights(p.s_ba))) {
      sorted = false;
      bad_sorted = t;
    }
  }
  r.checks.push_back(holds("finite_entries", finite, finite ? "all entries finite" : "non-finite entry found"));
  r.checks.push_back(at_most("basis_orthonormality", finite ? ortho : NAN, kBasisOrthonormalityTol));
  r.checks.push_back(holds("coupling_diagonal_sorted", sorted,
                           sorted ? "all couplings nonnegative and nonincreasing" : first_bad("unsorted coupling", bad_sorted)));
  return r;
}

ValidationReport validate(const HbsMatrix& h) {
  ValidationReport r;
  if (!shapes_ok(h, r)) return r;
  nested_common(h.tree, h.nodes, r);
  const IndexTree& tree = h.tree;
  double leaf = 0.0, transfer = 0.0, longb = 0.0;
  bool weights = true;
  int bad_w = -1;
  for (int t = 1; t < tree.node_count(); ++t) {
    const auto tt = static_cast<std::size_t>(t);
    const NestedNode& n = h.nodes[tt];
    if (tree.node(t).is_leaf()) {
      if (n.u.cols() > 0) leaf = std::max(leaf, orthonormality_defect(n.u));
      if (n.v.cols() > 0) leaf = std::max(leaf, orthonormality_defect(n.v));
    } else {
      transfer = std::max({transfer, weighted_orthonormality_defect(n.u, h.y[tt]),
                           weighted_orthonormality_defect(n.v, h.z[tt])});
      longb = std::max({longb, weighted_orthonormality_defect(hbs_long_basis(tree, h.nodes, t, false), h.y[tt]),
                        weighted_orthonormality_defect(hbs_long_basis(tree, h.nodes, t, true), h.z[tt])});
    }
    if (weights && !(sorted_weights(h.y[tt]) && sorted_weights(h.z[tt]))) {
      weights = false;
      bad_w = t;
    }
  }
  const double depth = std::max(1, tree.depth());
  r.checks.push_back(at_most("leaf_basis_orthonormality", leaf, kBasisOrthonormalityTol));
  r.checks.push_back(at_most("transfer_orthonormality_weighted", transfer, kNestedOrthonormalityTol));
  r.checks.push_back(at_most("long_basis_orthonormality_weighted", longb, kNestedOrthonormalityTol * depth));
  r.checks.push_back(holds("sample_weights_sorted", weights,
                           weights ? "y and z nonnegative and nonincreasing" : first_bad("unsorted weights", bad_w)));
  return r;
}

bool skeletons_nested(const HbsIdMatrix& h) {
  for (int t = 1; t < h.tree.node_count(); ++t) {
    const auto& nd = h.tree.node(t);
    if (nd.is_leaf()) continue;
    const auto tt = static_cast<std::size_t>(t), a = static_cast<std::size_t>(nd.left),
               b = static_cast<std::size_t>(nd.right);
    if (!subset_of(h.skel_in[tt], h.skel_in[a], h.skel_in[b])) return false;
    if (!subset_of(h.skel_out[tt], h.skel_out[a], h.skel_out[b])) return false;
  }
  return true;
}

bool identity_rows_exact(const HbsIdMatrix& h) {
  for (int t = 1; t < h.tree.node_count(); ++t) {
    const auto tt = static_cast<std::size_t>(t);
    if (!identity_rows(h.nodes[tt].u, candidates(h.tree, h.skel_in, t), h.skel_in[tt])) return false;
    if (!identity_rows(h.nodes[tt].v, candidates(h.tree, h.skel_out, t), h.skel_out[tt])) return false;
  }
  return true;
}

double skeleton_coupling_error(const HbsIdMatrix& h, const DenseMatrix& a) {
  double worst = 0.0;
  for (int t = 0; t < h.tree.node_count(); ++t) {
    const auto& nd = h.tree.node(t);
    if (nd.is_leaf()) continue;
    const NestedNode& n = h.nodes[static_cast<std::size_t>(t)];
    const auto l = static_cast<std::size_t>(nd.left), r = static_cast<std::size_t>(nd.right);
    auto compare = [&](const DenseMatrix& b, const std::vector<Index>& rows, const std::vector<Index>& cols) {
      for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
          worst = std::max(worst, std::abs(b(static_cast<Index>(i), static_cast<Index>(j)) - a(rows[i], cols[j])));
    };
    compare(n.b_ab, h.skel_in[l], h.skel_out[r]);
    compare(n.b_ba, h.skel_in[r], h.skel_out[l]);
  }
  return worst;
}

ValidationReport validate(const HbsIdMatrix& h) {
  ValidationReport r;
  if (!shapes_ok(h, r)) return r;
  nested_common(h.tree, h.nodes, r);
  bool sorted = true;
  for (const auto* list : {&h.skel_in, &h.skel_out})
    for (const auto& s : *list) sorted = sorted && std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end();
  r.checks.push_back(holds("skeletons_sorted", sorted, sorted ? "strictly ascending" : "a skeleton is not strictly ascending"));
  const bool nested = sorted && skeletons_nested(h);
  r.checks.push_back(holds("skeleton_nestedness", nested, nested ? "every parent skeleton within its children's"
                                                                 : "a parent skeleton leaves its children's union"));
  const bool ident = identity_rows_exact(h);
  r.checks.push_back(holds("identity_submatrix", ident, ident ? "exact identity rows at every skeleton"
                                                              : "an interpolation matrix lacks its identity rows"));
  return r;
}

ValidationReport validate(const CompressedMatrix& m) {
  return std::visit([](const auto& h) { return validate(h); }, m);
}

}  // namespace rsmat
