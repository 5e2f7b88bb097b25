#pragma once

#include <vector>

#include "rsmat/dense.hpp"

namespace rsmat {

// Binary partition of the index range [0, N).
//
// Nodes are numbered breadth-first from the root (node 0), so in a fully
// populated tree the children of node t are 2t+1 and 2t+2. Every node owns a
// contiguous half-open range; a node is split, left child taking the larger
// half, exactly when it holds more than `leaf_size` indices.
class IndexTree {
 public:
  struct Node {
    Index begin = 0;
    Index end = 0;
    int level = 0;
    int parent = -1;
    int left = -1;
    int right = -1;

    Index size() const { return end - begin; }
    bool is_leaf() const { return left < 0; }
  };

  IndexTree() = default;
  IndexTree(Index n, Index leaf_size);

  Index size() const { return n_; }
  Index leaf_size() const { return leaf_size_; }
  // Finest level index L; the root sits on level 0.
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  const Node& node(int t) const { return nodes_.at(static_cast<std::size_t>(t)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }
  int sibling(int t) const;

  // Nodes on a level, ordered left to right.
  const std::vector<int>& nodes_on_level(int level) const;
  // Non-leaf nodes on a level, ordered left to right.
  std::vector<int> parents_on_level(int level) const;
  const std::vector<int>& leaves() const { return leaves_; }
  Index max_leaf_size() const { return max_leaf_; }

  // Offset of child c inside its parent's range.
  Index offset_in_parent(int c) const { return node(c).begin - node(node(c).parent).begin; }

  friend bool operator==(const IndexTree& a, const IndexTree& b) {
    return a.n_ == b.n_ && a.leaf_size_ == b.leaf_size_;
  }

 private:
  Index n_ = 0;
  Index leaf_size_ = 0;
  Index max_leaf_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<int>> levels_;
  std::vector<int> leaves_;
};

}  // namespace rsmat
