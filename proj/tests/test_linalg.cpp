#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "doctest.h"
#include "rsmat/linalg.hpp"
#include "rsmat/rng.hpp"
#include "util.hpp"

using namespace rsmat;
using testutil::gaussian;

namespace {

DenseMatrix pivoted(const DenseMatrix& a, const std::vector<Index>& piv, Index k) {
  return select_cols(a, std::span<const Index>(piv.data(), static_cast<std::size_t>(k)));
}

DenseMatrix permuted(const DenseMatrix& a, const std::vector<Index>& piv) { return select_cols(a, piv); }

double qr_residual(const DenseMatrix& a, const QrResult& f) {
  const DenseMatrix ap = permuted(a, f.pivots);
  if (f.rank() == 0) return norm_2(ap);
  return norm_2(subtract(ap, testutil::naive_product(f.q, f.r)));
}

double svd_residual(const DenseMatrix& a, const SvdResult& f) {
  if (f.rank() == 0) return norm_2(a);
  DenseMatrix us = f.u;
  scale_columns(us.view(), f.s);
  return norm_2(subtract(a, matmul(us, f.v, Op::none, Op::trans)));
}

double id_residual(const DenseMatrix& a, const IdResult& f) {
  if (f.rank == 0) return norm_2(a);
  return norm_2(subtract(a, testutil::naive_product(pivoted(a, f.pivots, f.rank), f.x)));
}

bool exact_identity(const IdResult& f) {
  for (Index j = 0; j < f.rank; ++j)
    for (Index i = 0; i < f.rank; ++i)
      if (f.x(i, f.pivots[static_cast<std::size_t>(j)]) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

// Exact singular values of a test matrix, via Eigen's Jacobi SVD (a different
// algorithm from the library's divide-and-conquer path).
std::vector<double> jacobi_sigma(const DenseMatrix& a) {
  Eigen::Map<const Eigen::MatrixXd> m(a.data(), a.rows(), a.cols());
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace

TEST_CASE("qr of the identity") {
  const DenseMatrix a = DenseMatrix::identity(3);
  const QrResult f = qr(a, Full{});
  REQUIRE(f.rank() == 3);
  for (Index j = 0; j < 3; ++j) {
    int ones = 0;
    for (Index i = 0; i < 3; ++i) {
      CHECK((std::abs(f.q(i, j)) == doctest::Approx(1.0) || std::abs(f.q(i, j)) < 1e-15));
      ones += std::abs(f.q(i, j)) > 0.5;
    }
    CHECK(ones == 1);
    CHECK(std::abs(f.r(j, j)) == doctest::Approx(1.0));
  }
}

TEST_CASE("qr of a rank-one outer product") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 1}, {2, 2}, {2, 2}});
  const QrResult f = qr(a, Tolerance{1e-12});
  CHECK(f.rank() == 1);
  CHECK(qr_residual(a, f) <= 1e-12 * 3.0 * std::sqrt(2.0));
  // The retained column of Q is u / |u| = (1, 2, 2) / 3 up to sign.
  CHECK(std::abs(f.q(0, 0)) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(f.q(2, 0)) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("qr full-rank round trip, ordering and orthonormality") {
  const DenseMatrix a = gaussian(50, 50, 11);
  const QrResult f = qr(a, FixedRank{50});
  CHECK(qr_residual(a, f) <= 1e-12 * norm_2(a));
  CHECK(orthonormality_defect(f.q) <= 1e-13);
  for (Index j = 0; j < 50; ++j)
    for (Index i = j + 1; i < 50; ++i) CHECK(f.r(i, j) == 0.0);
  for (Index j = 1; j < 50; ++j) CHECK(std::abs(f.r(j, j)) <= std::abs(f.r(j - 1, j - 1)) * (1 + 1e-12));
  std::vector<Index> sorted = f.pivots;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Index> iota(50);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
}

TEST_CASE("svd of a diagonal matrix at fixed rank") {
  const DenseMatrix a = DenseMatrix::from_rows({{3, 0, 0}, {0, 2, 0}, {0, 0, 1}});
  const SvdResult f = svd(a, FixedRank{2});
  REQUIRE(f.rank() == 2);
  CHECK(f.s[0] == doctest::Approx(3.0));
  CHECK(f.s[1] == doctest::Approx(2.0));
  CHECK(svd_residual(a, f) == doctest::Approx(1.0));
}

TEST_CASE("svd of the zero matrix under a tolerance") {
  const DenseMatrix a(4, 4);
  const SvdResult f = svd(a, Tolerance{1e-9});
  CHECK(f.rank() == 0);
  CHECK(f.u.cols() == 0);
  CHECK(f.v.cols() == 0);
  CHECK(f.s.empty());
  CHECK(qr(a, Tolerance{1e-9}).rank() == 0);
  CHECK(id_decompose(a, Tolerance{1e-9}).rank == 0);
}

TEST_CASE("svd recovers a planted spectrum") {
  std::vector<double> s;
  for (int j = 1; j <= 20; ++j) s.push_back(std::pow(10.0, -j));
  const DenseMatrix a = testutil::planted_spectrum(30, 20, s, 5);
  // sigma_5 = 1e-5 sits exactly on a 1e-5 threshold, where roundoff decides;
  // just inside it the rank is unambiguous.
  const SvdResult f = svd(a, Tolerance{0.5e-5});
  CHECK(f.rank() == 5);
  for (int j = 0; j < 5; ++j) CHECK(f.s[static_cast<std::size_t>(j)] == doctest::Approx(s[static_cast<std::size_t>(j)]).epsilon(1e-10));
  const Index tie = svd(a, Tolerance{1e-5}).rank();
  CHECK((tie == 4 || tie == 5));
  CHECK(svd(a, Tolerance{2e-5}).rank() == 4);
  // Relative mode measures against sigma_1 = 0.1.
  CHECK(svd(a, Tolerance{5e-5, true}).rank() == 5);
}

TEST_CASE("singular values agree with eigenvalues of A^T A") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DenseMatrix g = gaussian(40, 25, seed);
    const SvdResult f = svd(g, Full{});
    const DenseMatrix gtg = testutil::naive_product(g.transposed(), g);
    Eigen::Map<const Eigen::MatrixXd> m(gtg.data(), 25, 25);
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
    std::vector<double> root(ev.data(), ev.data() + ev.size());
    for (double& v : root) v = std::sqrt(std::max(v, 0.0));
    std::sort(root.rbegin(), root.rend());
    for (std::size_t j = 0; j < root.size(); ++j) CHECK(std::abs(f.s[j] - root[j]) <= 1e-10 * root[j]);
  }
}

TEST_CASE("id of a rank-one 2x2 matrix") {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 2}, {2, 4}});
  const IdResult f = id_decompose(a, Tolerance{1e-12});
  REQUIRE(f.rank == 1);
  CHECK(f.skeleton()[0] == 1);
  CHECK(f.x(0, 0) == doctest::Approx(0.5));
  CHECK(f.x(0, 1) == 1.0);
}

TEST_CASE("id of the identity is a permuted identity") {
  const IdResult f = id_decompose(DenseMatrix::identity(3), FixedRank{3});
  CHECK(f.rank == 3);
  CHECK(exact_identity(f));
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 3; ++i) CHECK((f.x(i, j) == 0.0 || f.x(i, j) == 1.0));
}

TEST_CASE("id of a planted rank-4 product") {
  const DenseMatrix a = testutil::naive_product(gaussian(10, 4, 3), gaussian(4, 10, 4));
  const IdResult f = id_decompose(a, Tolerance{1e-10});
  CHECK(f.rank == 4);
  CHECK(id_residual(a, f) <= 1e-10 * norm_2(a));
  CHECK(exact_identity(f));
}

TEST_CASE("factorization errors") {
  const DenseMatrix empty(0, 3);
  CHECK_THROWS_AS(qr(empty, Full{}), std::invalid_argument);
  CHECK_THROWS_AS(svd(empty, Full{}), std::invalid_argument);
  CHECK_THROWS_AS(id_decompose(empty, Full{}), std::invalid_argument);
  const DenseMatrix a = gaussian(5, 4, 1);
  CHECK_THROWS_AS(qr(a, FixedRank{5}), std::invalid_argument);
  CHECK_THROWS_AS(svd(a, FixedRank{0}), std::invalid_argument);
  CHECK_THROWS_AS(id_decompose(a, FixedRank{-1}), std::invalid_argument);
  CHECK_THROWS_AS(svd(a, Tolerance{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(qr(a, Tolerance{-1.0}), std::invalid_argument);
}

TEST_CASE("round trips on 1000 random matrices in all three modes") {
  RandomStream rng(77);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index m = 1 + static_cast<Index>(rng.next_u64() % 200);
    const Index n = 1 + static_cast<Index>(rng.next_u64() % 200);
    const Index kmax = std::min(m, n);
    // Half Gaussian, half with a geometric spectrum so tolerances bite.
    DenseMatrix a;
    if (trial % 2 == 0) {
      a = gaussian(m, n, 1000 + static_cast<std::uint64_t>(trial));
    } else {
      std::vector<double> s(static_cast<std::size_t>(kmax));
      for (Index j = 0; j < kmax; ++j) s[static_cast<std::size_t>(j)] = std::pow(0.7, static_cast<double>(j));
      a = testutil::planted_spectrum(m, n, s, 5000 + static_cast<std::uint64_t>(trial));
    }
    const double a2 = norm_2(a);
    const std::vector<double> sigma = jacobi_sigma(a);
    const Index k = 1 + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(kmax));
    const double eps = std::pow(10.0, -2.0 - static_cast<double>(rng.next_u64() % 10));
    const double round = 1e-12 * a2;
    const double sigma_next = k < kmax ? sigma[static_cast<std::size_t>(k)] : 0.0;

    // Full
    CHECK(qr_residual(a, qr(a, Full{})) <= round);
    CHECK(svd_residual(a, svd(a, Full{})) <= round);
    const IdResult idf = id_decompose(a, Full{});
    CHECK(id_residual(a, idf) <= 1e-10 * a2);
    CHECK(exact_identity(idf));

    // FixedRank: SVD is optimal; the pivoted QR and the ID stay within a
    // modest factor of sigma_{k+1}.
    const SvdResult sf = svd(a, FixedRank{k});
    CHECK(sf.rank() == k);
    CHECK(std::abs(svd_residual(a, sf) - sigma_next) <= round);
    const double slack = std::sqrt(static_cast<double>(k * (n - k) + 1)) + 1.0;
    const QrResult qf = qr(a, FixedRank{k});
    CHECK(qf.rank() == k);
    CHECK(qr_residual(a, qf) <= slack * sigma_next + round);
    const IdResult idk = id_decompose(a, FixedRank{k});
    CHECK(idk.rank == k);
    CHECK(exact_identity(idk));
    CHECK(id_residual(a, idk) <= slack * sigma_next + 1e-10 * a2);

    // Tolerance
    const SvdResult st = svd(a, Tolerance{eps});
    CHECK(svd_residual(a, st) <= eps + round);
    const QrResult qt = qr(a, Tolerance{eps});
    CHECK(qr_residual(a, qt) <= eps * a2 * (1 + 1e-10) + round);
    const IdResult it = id_decompose(a, Tolerance{eps});
    CHECK(exact_identity(it));
    CHECK(id_residual(a, it) <= eps * a2 * (1 + 1e-6) + 1e-10 * a2);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("id coefficients stay bounded on Gaussian matrices") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const DenseMatrix a = gaussian(40, 60, seed);
    const IdResult f = id_decompose(a, FixedRank{20});
    CHECK(norm_max(f.x) <= 2.0);
  }
}

TEST_CASE("randomized range of the zero map is empty") {
  const DenseMatrix q = randomized_range([](const DenseMatrix& x) { return DenseMatrix(30, x.cols()); }, 20, 3, 5, 1);
  CHECK(q.rows() == 30);
  CHECK(q.cols() == 0);
}

TEST_CASE("randomized range of a rank-one map") {
  const DenseMatrix u = gaussian(40, 1, 1), v = gaussian(30, 1, 2);
  const DenseMatrix a = matmul(u, v, Op::none, Op::trans);
  const DenseMatrix q = randomized_range([&](const DenseMatrix& x) { return matmul(a, x); }, 30, 1, 5, 9);
  CHECK(orthonormality_defect(q) <= 1e-13);
  const DenseMatrix proj = matmul(q, matmul(q, a, Op::trans, Op::none));
  CHECK(norm_2(subtract(a, proj)) <= 1e-12 * norm_2(a));
}

TEST_CASE("randomized range on planted rank 10") {
  int failures = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const DenseMatrix a = testutil::naive_product(gaussian(100, 10, 2 * trial + 1), gaussian(10, 100, 2 * trial + 2));
    const DenseMatrix q = randomized_range([&](const DenseMatrix& x) { return matmul(a, x); }, 100, 10, 10, trial);
    const DenseMatrix res = subtract(a, matmul(q, matmul(q, a, Op::trans, Op::none)));
    failures += norm_2(res) > 1e-11 * norm_2(a);
  }
  CHECK(failures == 0);
}

TEST_CASE("randomized range argument errors") {
  auto id = [](const DenseMatrix& x) { return x; };
  CHECK_THROWS_AS(randomized_range(id, 10, 8, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(randomized_range(id, 10, -1, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(randomized_range([](const DenseMatrix& x) { return DenseMatrix(x.rows(), 1); }, 10, 2, 2, 1),
                  std::invalid_argument);
}

TEST_CASE("gaussian blocks are reproducible and standard normal") {
  CHECK(gaussian_block(1, 1, 42) == gaussian_block(1, 1, 42));
  CHECK_FALSE(gaussian_block(3, 2, 1) == gaussian_block(3, 2, 2));
  const DenseMatrix g = gaussian_block(10000, 1, 3);
  double mean = 0.0;
  for (double v : g.values()) mean += v;
  mean /= 10000.0;
  double var = 0.0;
  for (double v : g.values()) var += (v - mean) * (v - mean);
  var /= 9999.0;
  CHECK(std::abs(mean) <= 0.05);
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);
}

TEST_CASE("derived streams are independent of draw order") {
  RandomStream root(9);
  RandomStream a = root.derive({1, 2}), b = root.derive({1, 2}), c = root.derive({2, 1});
  const double first = a.next_normal();
  CHECK(first == b.next_normal());
  CHECK(first != c.next_normal());
  for (int i = 0; i < 1000; ++i) {
    const double u = root.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}
