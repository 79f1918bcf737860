#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "gsosel/errors.hpp"
#include "gsosel/manifold.hpp"
#include "helpers.hpp"

using namespace gsosel;
using linalg::Matrix;
using linalg::Vector;

namespace {

std::set<std::pair<int, int>> edge_set(const linalg::SparseMatrix& l) {
  std::set<std::pair<int, int>> out;
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t k = l.row_ptr()[i]; k < l.row_ptr()[i + 1]; ++k) {
      const int j = l.col_idx()[k];
      if (int(i) < j && l.values()[k] != 0.0) out.insert({int(i), j});
    }
  return out;
}

ManifoldConfig knn(int k) {
  ManifoldConfig c;
  c.k = k;
  return c;
}

Matrix dense_label_laplacian(const std::vector<int>& y) {
  const std::size_t m = y.size();
  Matrix w(m, m), l(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) w(i, j) = y[i] == y[j] ? 1.0 : 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < m; ++j) deg += w(i, j);
    for (std::size_t j = 0; j < m; ++j) l(i, j) = (i == j ? deg : 0.0) - w(i, j);
  }
  return l;
}

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("1-D k=1 example") {
  const InputLaplacian il = build_knn_laplacian(Matrix::from_rows({{0}, {1}, {10}}), knn(1));
  CHECK(edge_set(il.laplacian) == std::set<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(il.edges == 2);
}

TEST_CASE("identical rows are mutual nearest neighbours") {
  const InputLaplacian il = build_knn_laplacian(Matrix::from_rows({{5}, {0}, {0}, {9}}), knn(1));
  const auto e = edge_set(il.laplacian);
  CHECK(e.count({1, 2}) == 1);
  // Node 0 is closest to node 3 (distance 4 < 5).
  CHECK(e.count({0, 3}) == 1);
}

TEST_CASE("distance ties break toward the smaller index") {
  // Node 1 is at distance 1 from both 0 and 2.
  const InputLaplacian il = build_knn_laplacian(Matrix::from_rows({{0}, {1}, {2}, {10}}), knn(1));
  const auto e = edge_set(il.laplacian);
  CHECK(e.count({0, 1}) == 1);
  CHECK(e.count({1, 2}) == 1);  // from node 2's own choice
  CHECK(e.count({2, 3}) == 1);
}

TEST_CASE("k = m-1 gives the complete graph") {
  std::mt19937_64 rng(3);
  const Matrix z = testutil::random_matrix(6, 2, rng);
  const Matrix l = build_knn_laplacian(z, knn(5)).laplacian.to_dense();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(l(i, j) == (i == j ? 5.0 : -1.0));
}

TEST_CASE("k >= m is rejected") {
  CHECK_THROWS_AS(build_knn_laplacian(Matrix(3, 1), knn(3)), std::invalid_argument);
}

TEST_CASE("Laplacian invariants on random inputs") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 10 + rng() % 40;
    const Matrix z = testutil::random_matrix(m, 3, rng);
    for (ManifoldMode mode : {ManifoldMode::BinaryKnn, ManifoldMode::Rbf}) {
      ManifoldConfig cfg = knn(2);
      cfg.mode = mode;
      const InputLaplacian il = build_knn_laplacian(z, cfg);
      const linalg::SparseMatrix& l = il.laplacian;
      CHECK(l.is_symmetric());
      for (double s : l.row_sums()) CHECK(std::abs(s) <= 1e-12);
      for (std::size_t i = 0; i < m; ++i) {
        int deg = 0;
        for (std::size_t k = l.row_ptr()[i]; k < l.row_ptr()[i + 1]; ++k) {
          if (std::size_t(l.col_idx()[k]) == i) continue;
          ++deg;
          if (mode == ManifoldMode::BinaryKnn) CHECK(l.values()[k] == -1.0);
        }
        CHECK(deg >= 2);
      }
      Vector v(m);
      for (int probe = 0; probe < 5; ++probe) {
        for (double& x : v) x = g(rng);
        CHECK(linalg::dot(v, l.multiply(v)) >= -1e-10);
      }
    }
  }
}

TEST_CASE("binary graph is unchanged by scaling and rotation") {
  std::mt19937_64 rng(5);
  const Matrix z = testutil::random_matrix(40, 4, rng);
  const auto base = build_knn_laplacian(z, knn(2)).laplacian;
  CHECK(build_knn_laplacian(2.0 * z, knn(2)).laplacian == base);
  CHECK(build_knn_laplacian(0.5 * z, knn(2)).laplacian == base);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(testutil::to_eigen(testutil::random_matrix(4, 4, rng)));
  const Eigen::MatrixXd q = qr.householderQ();
  Matrix o(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) o(i, j) = q(i, j);
  CHECK(edge_set(build_knn_laplacian(linalg::matmul(z, o), knn(2)).laplacian) == edge_set(base));
}

TEST_CASE("RBF weights and median bandwidth") {
  ManifoldConfig cfg = knn(1);
  cfg.mode = ManifoldMode::Rbf;
  const InputLaplacian il = build_knn_laplacian(Matrix::from_rows({{0}, {1}, {3}}), cfg);
  // Edges (0,1) length 1 and (1,2) length 2: median 1.5.
  CHECK(il.bandwidth == 1.5);
  CHECK(il.laplacian.coeff(0, 1) == doctest::Approx(-std::exp(-1.0 / (2 * 2.25))));
  cfg.bandwidth = 1.0;
  const InputLaplacian fixed = build_knn_laplacian(Matrix::from_rows({{0}, {1}, {3}}), cfg);
  CHECK(fixed.laplacian.coeff(1, 2) == doctest::Approx(-std::exp(-2.0)));
  cfg.bandwidth = -1.0;
  CHECK_THROWS_AS(validate_manifold_config(cfg), std::invalid_argument);
}

TEST_CASE("label Laplacian examples") {
  const LabelLaplacianOp ly({0, 0, 1, 1});
  CHECK(ly(Vector{1, 2, 3, 4}) == Vector{-1, 1, -1, 1});
  CHECK(linalg::to_dense(ly) == dense_label_laplacian({0, 0, 1, 1}));
  CHECK(ly(Vector{1, 1, 1, 1}) == Vector{0, 0, 0, 0});
  CHECK(ly(Vector{1, 1, 0, 0}) == Vector{0, 0, 0, 0});

  const LabelLaplacianOp one({2, 2, 2});
  const Vector v{1.0, 4.0, -2.0};
  const Vector out = one(v);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(3 * v[i] - 3.0));
  CHECK_THROWS_AS(LabelLaplacianOp({}), InputError);
}

TEST_CASE("label Laplacian matches the dense oracle and its energy identity") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + rng() % 49;
    const int c = 1 + int(rng() % 5);
    std::vector<int> y(m);
    for (int& l : y) l = int(rng() % c);
    const LabelLaplacianOp op(y);
    const Matrix dense = dense_label_laplacian(y);
    Vector v(m), u(m);
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = g(rng);
      u[i] = g(rng);
    }
    const Vector lv = op(v), ref = linalg::DenseOperator(dense)(v);
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(lv[i] - ref[i]) <= 1e-12);
    double energy = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (y[i] == y[j]) energy += (v[i] - v[j]) * (v[i] - v[j]);
    CHECK(linalg::dot(v, lv) == doctest::Approx(energy).epsilon(1e-10));
    CHECK(linalg::dot(u, lv) == doctest::Approx(linalg::dot(v, op(u))).epsilon(1e-10));
  }
}

TEST_CASE("subset selection") {
  SbmConfig cfg;
  cfg.n = 5;
  cfg.c = 1;
  cfg.d = 1;
  GraphBundle b = generate_sbm(cfg);
  b.split = {Split::Train, Split::Val, Split::Train, Split::Val, Split::Test};
  CHECK(select_subset(b, {SubsetKind::All}) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(select_subset(b, {SubsetKind::Val}) == std::vector<int>{1, 3});
  CHECK(select_subset(b, {SubsetKind::Test}) == std::vector<int>{4});
  b.split.assign(5, Split::Train);
  CHECK_THROWS_AS(select_subset(b, {SubsetKind::Val}), InputError);
}

TEST_CASE("sample subsets are distinct and reproducible") {
  SbmConfig cfg;
  cfg.n = 169343;
  cfg.c = 2;
  cfg.p_in = 0.0;
  cfg.p_out = 0.0;
  cfg.d = 2;
  const GraphBundle b = generate_sbm(cfg);
  const SubsetSpec spec{SubsetKind::Sample, 2000, 17};
  const auto a = select_subset(b, spec);
  CHECK(a.size() == 2000);
  CHECK(std::set<int>(a.begin(), a.end()).size() == 2000);
  CHECK(select_subset(b, spec) == a);
  CHECK(select_subset(b, {SubsetKind::Sample, 2000, 18}) != a);
  CHECK(select_subset(b, {SubsetKind::Sample, 500000, 1}).size() == 169343);
}

}  // TEST_SUITE
