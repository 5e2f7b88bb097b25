#include "rsmat/index_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsmat {

IndexTree::IndexTree(Index n, Index leaf_size) : n_(n), leaf_size_(leaf_size) {
  if (n < 1) throw std::invalid_argument("IndexTree: N must be positive");
  if (leaf_size < 1) throw std::invalid_argument("IndexTree: leaf size must be positive");

  nodes_.push_back(Node{0, n, 0, -1, -1, -1});
  // Breadth-first: nodes_ grows while we walk it.
  for (std::size_t t = 0; t < nodes_.size(); ++t) {
    const Node cur = nodes_[t];
    if (static_cast<std::size_t>(cur.level) >= levels_.size()) levels_.emplace_back();
    levels_[static_cast<std::size_t>(cur.level)].push_back(static_cast<int>(t));
    if (cur.size() <= leaf_size) {
      leaves_.push_back(static_cast<int>(t));
      max_leaf_ = std::max(max_leaf_, cur.size());
      continue;
    }
    const Index mid = cur.begin + (cur.size() + 1) / 2;
    const int left = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{cur.begin, mid, cur.level + 1, static_cast<int>(t), -1, -1});
    nodes_.push_back(Node{mid, cur.end, cur.level + 1, static_cast<int>(t), -1, -1});
    nodes_[t].left = left;
    nodes_[t].right = left + 1;
  }
  std::sort(leaves_.begin(), leaves_.end(),
            [this](int a, int b) { return nodes_[static_cast<std::size_t>(a)].begin < nodes_[static_cast<std::size_t>(b)].begin; });
}

int IndexTree::sibling(int t) const {
  const Node& nd = node(t);
  if (nd.parent < 0) return -1;
  const Node& p = node(nd.parent);
  return p.left == t ? p.right : p.left;
}

const std::vector<int>& IndexTree::nodes_on_level(int level) const {
  if (level < 0 || level > depth()) throw std::out_of_range("IndexTree: level out of range");
  return levels_[static_cast<std::size_t>(level)];
}

std::vector<int> IndexTree::parents_on_level(int level) const {
  std::vector<int> out;
  for (int t : nodes_on_level(level))
    if (!node(t).is_leaf()) out.push_back(t);
  return out;
}

}  // namespace rsmat
