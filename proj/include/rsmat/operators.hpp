#pragma once
//
// Test operators: kernel matrices on curves, the grid-conduction frontal
// Schur complement, and dense matrices with planted rank structure.
//

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsmat/dense.hpp"
#include "rsmat/index_tree.hpp"
#include "rsmat/oracle.hpp"
#include "rsmat/parallel.hpp"

namespace rsmat {

using Point2 = std::array<double, 2>;

// Points in the plane. Callers order them so that contiguous index ranges are
// geometrically contiguous (arc-length or coordinate order); the tree
// partition relies on that for its off-diagonal blocks to be low rank.
struct PointSet2D {
  std::vector<Point2> points;
  Index size() const { return static_cast<Index>(points.size()); }
};

// Whitespace-delimited "x y" per line; blank lines and lines starting with '#'
// are skipped. Throws std::runtime_error on unreadable or malformed input.
PointSet2D load_points(const std::string& path);
// Throws std::invalid_argument if two points coincide.
void require_distinct(const PointSet2D& pts);

// Smooth closed curve gamma : [0, 2 pi) -> R^2, counterclockwise.
struct Curve {
  std::function<Point2(double)> position;
  std::function<Point2(double)> derivative;
  std::function<Point2(double)> second_derivative;
};

Curve circle_curve(double radius = 1.0);
// r(t) = 1 + amplitude * cos(lobes * t).
Curve star_curve(double amplitude = 0.3, int lobes = 3);

// Nodes gamma(2 pi j / n), j = 0..n-1.
PointSet2D curve_points(const Curve& curve, Index n);

// A(i, j) = -log|x_i - x_j| / (2 pi), zero diagonal.
DenseMatrix log_kernel_matrix(const PointSet2D& pts, Exec exec = Exec::parallel);
OraclePtr log_kernel_oracle(const PointSet2D& pts, Exec exec = Exec::parallel);

// Log kernel at the nodes of a curve with trapezoidal arc-length weights:
// A(i, j) = -log|x_i - x_j| / (2 pi) * |gamma'(t_j)| * 2 pi / n, zero diagonal.
// Unlike the bare point-charge matrix its norm stays O(1) as n grows.
DenseMatrix single_layer_matrix(const Curve& curve, Index n, Exec exec = Exec::parallel);
OraclePtr single_layer_oracle(const Curve& curve, Index n, Exec exec = Exec::parallel);

// Trapezoidal Nystrom discretization of 1/2 I + D on n equispaced parameter
// nodes, where D has kernel (x - y) . n(y) / (2 pi |x - y|^2) and the
// diagonal takes the limiting value -kappa(y) / (4 pi).
DenseMatrix double_layer_matrix(const Curve& curve, Index n, Exec exec = Exec::parallel);
OraclePtr double_layer_oracle(const Curve& curve, Index n, Exec exec = Exec::parallel);

// Bar conductivities of a width x height grid. horizontal(x, y) couples
// (x, y)-(x+1, y); vertical(x, y) couples (x, y)-(x, y+1).
struct GridConductivity {
  Index width = 0;
  Index height = 0;
  DenseMatrix horizontal;  // (width - 1) x height
  DenseMatrix vertical;    // width x (height - 1)
};

// Uniform on [1, 2] drawn from the seed, or all ones when seed is empty.
GridConductivity grid_conductivity(Index width, Index height, std::optional<std::uint64_t> seed);

// Schur complement of the 5-point grid-conduction matrix onto the middle
// column. The left and right regions are eliminated with sparse Cholesky
// factors computed at construction.
class SchurFrontalOracle final : public LinearOracle {
 public:
  explicit SchurFrontalOracle(GridConductivity g);
  Index dim() const override { return g_.height; }
  DenseMatrix apply(const DenseMatrix& x) const override;
  DenseMatrix apply_adjoint(const DenseMatrix& x) const override { return apply(x); }
  const GridConductivity& conductivity() const { return g_; }

 private:
  struct Factor;
  struct Region {
    Index x0 = 0;     // first grid column of the region
    Index width = 0;  // columns in the region
    Index bar = 0;    // grid column of the bars joining the region to the separator
    std::shared_ptr<const Factor> factor;
  };
  Region make_region(Index x0) const;
  void eliminate(const Region& r, const DenseMatrix& x, DenseMatrix& y) const;

  GridConductivity g_;
  Index center_ = 0;
  Region left_, right_;
};

OraclePtr schur_frontal_oracle(Index grid_width, Index n, std::optional<std::uint64_t> conductivity_seed);

// Dense matrix whose sibling blocks are independent rank-`rank` products
// U B V^T with orthonormal U, V and Gaussian B; leaf blocks are Gaussian.
DenseMatrix planted_hodlr_matrix(const IndexTree& tree, Index rank, std::uint64_t seed);
// Dense matrix assembled from telescoping nested bases: orthonormal leaf
// bases, orthonormal transfer matrices, Gaussian sibling couplings and leaf
// blocks. Node ranks are min(rank, n_tau).
DenseMatrix planted_hbs_matrix(const IndexTree& tree, Index rank, std::uint64_t seed);

}  // namespace rsmat
