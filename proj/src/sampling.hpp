#pragma once
// Probe-block helpers shared by the HODLR and HBS sweeps. Internal header.

#include <cstdint>
#include <span>
#include <vector>

#include "rsmat/dense.hpp"
#include "rsmat/index_tree.hpp"
#include "rsmat/parallel.hpp"
#include "rsmat/rng.hpp"

namespace rsmat::detail {

// Gaussian probe pair for one level: columns [0, s) carry an independent
// block on every left child, columns [s, 2s) one on every right child. A
// child smaller than s gets a block of width n_child.
inline DenseMatrix level_probe(const IndexTree& tree, const std::vector<int>& parents, Index s,
                               std::uint64_t seed, int level, Exec exec) {
  DenseMatrix omega(tree.size(), 2 * s);
  const RandomStream base = RandomStream(seed).derive({static_cast<std::uint64_t>(level)});
  for_each_index(exec, static_cast<Index>(parents.size()), [&](Index p) {
    const auto& nd = tree.node(parents[static_cast<std::size_t>(p)]);
    int side = 0;
    for (int c : {nd.left, nd.right}) {
      const auto& ch = tree.node(c);
      RandomStream rng = base.derive({static_cast<std::uint64_t>(c)});
      const DenseMatrix g = gaussian_block(ch.size(), std::min(s, ch.size()), rng);
      copy_into(g, omega.block(ch.begin, side * s, g.rows(), g.cols()));
      ++side;
    }
  });
  return omega;
}

// Padded identity: column j of block t is e_{begin_t + j}, for every leaf.
inline DenseMatrix leaf_probe(const IndexTree& tree) {
  DenseMatrix omega(tree.size(), tree.max_leaf_size());
  for (int t : tree.leaves()) {
    const auto& nd = tree.node(t);
    for (Index j = 0; j < nd.size(); ++j) omega(nd.begin + j, j) = 1.0;
  }
  return omega;
}

// Sets entries below floor * max to zero.
inline void zero_small(std::vector<double>& s, double floor) {
  double top = 0.0;
  for (double v : s) top = std::max(top, v);
  for (double& v : s)
    if (v <= floor * top) v = 0.0;
}

}  // namespace rsmat::detail
