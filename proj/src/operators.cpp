#include "rsmat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "rsmat/linalg.hpp"
#include "rsmat/rng.hpp"

namespace rsmat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

DenseMatrix random_orthonormal(Index n, Index k, RandomStream rng) {
  if (k == 0) return DenseMatrix(n, 0);
  return qr(gaussian_block(n, k, rng), Full{}).q;
}

}  // namespace

PointSet2D load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file: " + path);
  PointSet2D out;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    Point2 p{};
    std::string extra;
    if (!(ss >> p[0] >> p[1]) || (ss >> extra))
      throw std::runtime_error("malformed point on line " + std::to_string(lineno) + " of " + path);
    out.points.push_back(p);
  }
  if (out.points.empty()) throw std::runtime_error("no points in " + path);
  return out;
}

void require_distinct(const PointSet2D& pts) {
  std::vector<Point2> sorted = pts.points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("point set contains coincident points");
}

Curve circle_curve(double radius) {
  Curve c;
  c.position = [radius](double t) { return Point2{radius * std::cos(t), radius * std::sin(t)}; };
  c.derivative = [radius](double t) { return Point2{-radius * std::sin(t), radius * std::cos(t)}; };
  c.second_derivative = [radius](double t) { return Point2{-radius * std::cos(t), -radius * std::sin(t)}; };
  return c;
}

Curve star_curve(double amplitude, int lobes) {
  const double a = amplitude, m = lobes;
  auto r = [=](double t) { return 1.0 + a * std::cos(m * t); };
  auto r1 = [=](double t) { return -a * m * std::sin(m * t); };
  auto r2 = [=](double t) { return -a * m * m * std::cos(m * t); };
  Curve c;
  c.position = [=](double t) { return Point2{r(t) * std::cos(t), r(t) * std::sin(t)}; };
  c.derivative = [=](double t) {
    return Point2{r1(t) * std::cos(t) - r(t) * std::sin(t), r1(t) * std::sin(t) + r(t) * std::cos(t)};
  };
  c.second_derivative = [=](double t) {
    return Point2{r2(t) * std::cos(t) - 2.0 * r1(t) * std::sin(t) - r(t) * std::cos(t),
                  r2(t) * std::sin(t) + 2.0 * r1(t) * std::cos(t) - r(t) * std::sin(t)};
  };
  return c;
}

PointSet2D curve_points(const Curve& curve, Index n) {
  if (n < 1) throw std::invalid_argument("curve_points: n must be positive");
  PointSet2D out;
  out.points.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) out.points.push_back(curve.position(kTwoPi * static_cast<double>(j) / static_cast<double>(n)));
  return out;
}

DenseMatrix log_kernel_matrix(const PointSet2D& pts, Exec exec) {
  require_distinct(pts);
  const Index n = pts.size();
  DenseMatrix a(n, n);
  for_each_index(exec, n, [&](Index j) {
    const Point2& y = pts.points[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i)
      if (i != j) a(i, j) = -std::log(dist(pts.points[static_cast<std::size_t>(i)], y)) / kTwoPi;
  });
  return a;
}

OraclePtr log_kernel_oracle(const PointSet2D& pts, Exec exec) { return dense_oracle(log_kernel_matrix(pts, exec)); }

DenseMatrix single_layer_matrix(const Curve& curve, Index n, Exec exec) {
  if (n < 2) throw std::invalid_argument("single_layer: need at least 2 nodes");
  DenseMatrix a = log_kernel_matrix(curve_points(curve, n), exec);
  const double h = kTwoPi / static_cast<double>(n);
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const Point2 d1 = curve.derivative(h * static_cast<double>(j));
    weight[static_cast<std::size_t>(j)] = std::hypot(d1[0], d1[1]) * h;
  }
  scale_columns(a.view(), weight);
  return a;
}

OraclePtr single_layer_oracle(const Curve& curve, Index n, Exec exec) {
  return dense_oracle(single_layer_matrix(curve, n, exec));
}

DenseMatrix double_layer_matrix(const Curve& curve, Index n, Exec exec) {
  if (n < 8) throw std::invalid_argument("double_layer: need at least 8 nodes");
  const double h = kTwoPi / static_cast<double>(n);
  std::vector<Point2> x(static_cast<std::size_t>(n)), normal(x.size());
  std::vector<double> weight(x.size()), kappa(x.size());
  for (Index j = 0; j < n; ++j) {
    const double t = h * static_cast<double>(j);
    const Point2 d1 = curve.derivative(t), d2 = curve.second_derivative(t);
    const double speed = std::hypot(d1[0], d1[1]);
    if (!(speed > 0.0) || !std::isfinite(speed)) throw std::invalid_argument("double_layer: degenerate curve");
    const auto k = static_cast<std::size_t>(j);
    x[k] = curve.position(t);
    normal[k] = {d1[1] / speed, -d1[0] / speed};
    weight[k] = speed * h;
    kappa[k] = (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed);
  }
  DenseMatrix a(n, n);
  for_each_index(exec, n, [&](Index j) {
    const auto jj = static_cast<std::size_t>(j);
    for (Index i = 0; i < n; ++i) {
      if (i == j) {
        a(i, j) = 0.5 - kappa[jj] / (2.0 * kTwoPi) * weight[jj];
        continue;
      }
      const Point2& xi = x[static_cast<std::size_t>(i)];
      const double dx = xi[0] - x[jj][0], dy = xi[1] - x[jj][1];
      a(i, j) = (dx * normal[jj][0] + dy * normal[jj][1]) / (kTwoPi * (dx * dx + dy * dy)) * weight[jj];
    }
  });
  return a;
}

OraclePtr double_layer_oracle(const Curve& curve, Index n, Exec exec) {
  return dense_oracle(double_layer_matrix(curve, n, exec));
}

GridConductivity grid_conductivity(Index width, Index height, std::optional<std::uint64_t> seed) {
  if (width < 3 || width % 2 == 0) throw std::invalid_argument("frontal grid: width must be odd and at least 3");
  if (height < 2) throw std::invalid_argument("frontal grid: separator length must be at least 2");
  GridConductivity g;
  g.width = width;
  g.height = height;
  g.horizontal = DenseMatrix(width - 1, height);
  g.vertical = DenseMatrix(width, height - 1);
  auto fill = [&](DenseMatrix& m, std::uint64_t tag) {
    if (!seed) {
      std::fill(m.values().begin(), m.values().end(), 1.0);
      return;
    }
    RandomStream rng = RandomStream(*seed).derive({tag});
    for (double& v : m.values()) v = 1.0 + rng.next_uniform();
  };
  fill(g.horizontal, 1);
  fill(g.vertical, 2);
  return g;
}

SchurFrontalOracle::SchurFrontalOracle(GridConductivity g) : g_(std::move(g)) {
  center_ = (g_.width - 1) / 2;
  left_ = make_region(0);
  right_ = make_region(center_ + 1);
}

// Region nodes are numbered row by row, so the natural ordering keeps the
// factor inside the band of width `width`.
struct SchurFrontalOracle::Factor {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
};

SchurFrontalOracle::Region SchurFrontalOracle::make_region(Index x0) const {
  Region r;
  r.x0 = x0;
  r.width = center_;
  r.bar = x0 == 0 ? center_ - 1 : center_;
  const Index n = r.width * g_.height;
  auto local = [&](Index x, Index y) { return static_cast<int>(y * r.width + (x - x0)); };
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  for (Index y = 0; y < g_.height; ++y) {
    for (Index x = x0; x < x0 + r.width; ++x) {
      const int p = local(x, y);
      double diag = 0.0;
      if (x > 0) diag += g_.horizontal(x - 1, y);
      if (x < g_.width - 1) diag += g_.horizontal(x, y);
      if (y > 0) diag += g_.vertical(x, y - 1);
      if (y < g_.height - 1) diag += g_.vertical(x, y);
      entries.emplace_back(p, p, diag);
      if (x + 1 < x0 + r.width) entries.emplace_back(local(x + 1, y), p, -g_.horizontal(x, y));
      if (y + 1 < g_.height) entries.emplace_back(local(x, y + 1), p, -g_.vertical(x, y));
    }
  }
  Eigen::SparseMatrix<double> b(n, n);
  b.setFromTriplets(entries.begin(), entries.end());
  auto f = std::make_shared<Factor>();
  f->llt.compute(b);
  if (f->llt.info() != Eigen::Success) throw std::runtime_error("frontal grid: region matrix is not positive definite");
  r.factor = std::move(f);
  return r;
}

void SchurFrontalOracle::eliminate(const Region& r, const DenseMatrix& x, DenseMatrix& y) const {
  const Index n = r.width * g_.height, s = x.cols();
  // Region column next to the separator.
  const Index col = r.x0 == 0 ? r.width - 1 : 0;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, s);
  for (Index j = 0; j < s; ++j)
    for (Index k = 0; k < g_.height; ++k) rhs(k * r.width + col, j) = -g_.horizontal(r.bar, k) * x(k, j);
  const Eigen::MatrixXd sol = r.factor->llt.solve(rhs);
  for (Index j = 0; j < s; ++j)
    for (Index k = 0; k < g_.height; ++k) y(k, j) += g_.horizontal(r.bar, k) * sol(k * r.width + col, j);
}

DenseMatrix SchurFrontalOracle::apply(const DenseMatrix& x) const {
  if (x.rows() != dim()) throw std::invalid_argument("oracle: input row count does not match dimension");
  const Index n = g_.height, c = center_;
  DenseMatrix y(n, x.cols());
  if (x.cols() == 0) return y;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index k = 0; k < n; ++k) {
      double diag = g_.horizontal(c - 1, k) + g_.horizontal(c, k);
      double v = 0.0;
      if (k > 0) {
        diag += g_.vertical(c, k - 1);
        v -= g_.vertical(c, k - 1) * x(k - 1, j);
      }
      if (k + 1 < n) {
        diag += g_.vertical(c, k);
        v -= g_.vertical(c, k) * x(k + 1, j);
      }
      y(k, j) = diag * x(k, j) + v;
    }
  }
  eliminate(left_, x, y);
  eliminate(right_, x, y);
  return y;
}

OraclePtr schur_frontal_oracle(Index grid_width, Index n, std::optional<std::uint64_t> conductivity_seed) {
  return std::make_shared<SchurFrontalOracle>(grid_conductivity(grid_width, n, conductivity_seed));
}

DenseMatrix planted_hodlr_matrix(const IndexTree& tree, Index rank, std::uint64_t seed) {
  if (rank < 0) throw std::invalid_argument("planted_hodlr_matrix: negative rank");
  const RandomStream root(seed);
  DenseMatrix a(tree.size(), tree.size());
  for (int t = 0; t < tree.node_count(); ++t) {
    const auto& nd = tree.node(t);
    const auto tag = static_cast<std::uint64_t>(t);
    if (nd.is_leaf()) {
      RandomStream rng = root.derive({tag, 0});
      copy_into(gaussian_block(nd.size(), nd.size(), rng), a.block(nd.begin, nd.begin, nd.size(), nd.size()));
      continue;
    }
    const auto& l = tree.node(nd.left);
    const auto& r = tree.node(nd.right);
    const Index k = std::min({rank, l.size(), r.size()});
    if (k == 0) continue;
    auto plant = [&](const IndexTree::Node& rows, const IndexTree::Node& cols, std::uint64_t side) {
      const DenseMatrix u = random_orthonormal(rows.size(), k, root.derive({tag, side, 1}));
      const DenseMatrix v = random_orthonormal(cols.size(), k, root.derive({tag, side, 2}));
      RandomStream brng = root.derive({tag, side, 3});
      const DenseMatrix b = gaussian_block(k, k, brng);
      const DenseMatrix ub = matmul(u, b);
      gemm(Op::none, Op::trans, 1.0, ub, v, 0.0, a.block(rows.begin, cols.begin, rows.size(), cols.size()));
    };
    plant(l, r, 1);
    plant(r, l, 2);
  }
  return a;
}

DenseMatrix planted_hbs_matrix(const IndexTree& tree, Index rank, std::uint64_t seed) {
  if (rank < 0) throw std::invalid_argument("planted_hbs_matrix: negative rank");
  const RandomStream root(seed);
  const auto count = static_cast<std::size_t>(tree.node_count());
  std::vector<DenseMatrix> ulong(count), vlong(count);
  // Children are numbered after their parents, so a reverse walk is bottom-up.
  for (int t = tree.node_count() - 1; t >= 1; --t) {
    const auto& nd = tree.node(t);
    const auto tag = static_cast<std::uint64_t>(t);
    const auto tt = static_cast<std::size_t>(t);
    if (nd.is_leaf()) {
      const Index k = std::min(rank, nd.size());
      ulong[tt] = random_orthonormal(nd.size(), k, root.derive({tag, 1}));
      vlong[tt] = random_orthonormal(nd.size(), k, root.derive({tag, 2}));
      continue;
    }
    const auto l = static_cast<std::size_t>(nd.left), r = static_cast<std::size_t>(nd.right);
    auto lift = [&](const std::vector<DenseMatrix>& basis, std::uint64_t side) {
      const Index kids = basis[l].cols() + basis[r].cols();
      const DenseMatrix transfer = random_orthonormal(kids, std::min(rank, kids), root.derive({tag, side}));
      return matmul(block_diag(basis[l], basis[r]), transfer);
    };
    ulong[tt] = lift(ulong, 1);
    vlong[tt] = lift(vlong, 2);
  }

  DenseMatrix a(tree.size(), tree.size());
  for (int t = 0; t < tree.node_count(); ++t) {
    const auto& nd = tree.node(t);
    const auto tag = static_cast<std::uint64_t>(t);
    if (nd.is_leaf()) {
      RandomStream rng = root.derive({tag, 0});
      copy_into(gaussian_block(nd.size(), nd.size(), rng), a.block(nd.begin, nd.begin, nd.size(), nd.size()));
      continue;
    }
    auto couple = [&](int rows, int cols, std::uint64_t side) {
      const auto& rn = tree.node(rows);
      const auto& cn = tree.node(cols);
      const DenseMatrix& u = ulong[static_cast<std::size_t>(rows)];
      const DenseMatrix& v = vlong[static_cast<std::size_t>(cols)];
      if (u.cols() == 0 || v.cols() == 0) return;
      RandomStream brng = root.derive({tag, side, 3});
      const DenseMatrix ub = matmul(u, gaussian_block(u.cols(), v.cols(), brng));
      gemm(Op::none, Op::trans, 1.0, ub, v, 0.0, a.block(rn.begin, cn.begin, rn.size(), cn.size()));
    };
    couple(nd.left, nd.right, 1);
    couple(nd.right, nd.left, 2);
  }
  return a;
}

}  // namespace rsmat
