#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gsosel/errors.hpp"
#include "gsosel/linalg/solvers.hpp"
#include "gsosel/msd.hpp"
#include "helpers.hpp"

using namespace gsosel;
using linalg::Matrix;

namespace {

MsdConfig dense_cfg(int k = 2) {
  MsdConfig c;
  c.manifold.k = k;
  c.manifold.subset.kind = SubsetKind::All;
  c.solver = MsdSolver::Dense;
  return c;
}

GraphBundle cycle(int n) {
  GraphBundle b;
  b.name = "cycle";
  b.n = n;
  b.d = 3;
  b.c = 2;
  for (int i = 0; i + 1 < n; ++i) b.edges.push_back({i, i + 1});
  b.edges.push_back({0, n - 1});
  std::sort(b.edges.begin(), b.edges.end());
  std::mt19937_64 rng(5);
  b.features = testutil::random_matrix(n, 3, rng);
  for (int i = 0; i < n; ++i) b.labels.push_back(i % 2);
  b.split.assign(n, Split::Val);
  return b;
}

GraphBundle small_sbm(std::uint64_t seed) {
  SbmConfig cfg;
  cfg.n = 90;
  cfg.c = 3;
  cfg.p_in = 0.2;
  cfg.p_out = 0.02;
  cfg.d = 6;
  cfg.seed = seed;
  return generate_sbm(cfg);
}

}  // namespace

TEST_SUITE("msd") {

TEST_CASE("zero label Laplacian gives zero") {
  const linalg::ZeroOperator ly(2);
  const auto lz = linalg::SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}});
  for (MsdSolver s : {MsdSolver::Dense, MsdSolver::Iterative}) {
    MsdConfig cfg;
    cfg.solver = s;
    const MsdReport r = solve_msd_pencil(ly, lz, cfg);
    CHECK(r.lambda_max == 0.0);
    CHECK_FALSE(r.inverse_msd.has_value());
  }
}

TEST_CASE("L_Y = L_Z on P2 gives 2/(2+eps)") {
  const auto lz = linalg::SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}});
  const linalg::SparseOperator ly(lz);
  MsdConfig cfg;
  cfg.solver = MsdSolver::Dense;
  const MsdReport r = solve_msd_pencil(ly, lz, cfg);
  CHECK(r.epsilon_used == doctest::Approx(1e-3).epsilon(1e-15));
  const double oracle = testutil::eigen_pencil_max(testutil::to_eigen(lz.to_dense()),
                                                   testutil::to_eigen(lz.to_dense()) +
                                                       1e-3 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(oracle == doctest::Approx(2.0 / 2.001).epsilon(1e-13));
  CHECK(r.lambda_max == doctest::Approx(2.0 / 2.001).epsilon(1e-12));
  cfg.solver = MsdSolver::Iterative;
  CHECK(solve_msd_pencil(ly, lz, cfg).lambda_max == doctest::Approx(2.0 / 2.001).epsilon(1e-6));
}

TEST_CASE("aligned labels distort less than anti-aligned ones") {
  const Matrix z = Matrix::from_rows({{0}, {0.1}, {5}, {5.1}});
  MsdConfig cfg = dense_cfg(1);
  const MsdReport aligned = compute_msd(z, std::vector<int>{0, 0, 1, 1}, cfg);
  const MsdReport anti = compute_msd(z, std::vector<int>{0, 1, 0, 1}, cfg);
  // Values from a dense generalized symmetric eigensolver on the same pencils.
  CHECK(aligned.lambda_max == doctest::Approx(0.9995002498750625).epsilon(1e-12));
  CHECK(anti.lambda_max == doctest::Approx(2000.0000000001446).epsilon(1e-9));
  CHECK(aligned.lambda_max < anti.lambda_max);
  CHECK(aligned.knn_edges == 2);
}

TEST_CASE("inverse sentinel") {
  CHECK_FALSE(inverse_msd(0.0).has_value());
  CHECK_FALSE(inverse_msd(5e-16).has_value());
  CHECK(*inverse_msd(4.0) == 0.25);
}

TEST_CASE("Rayleigh identity of the returned direction") {
  std::mt19937_64 rng(7);
  for (MsdSolver s : {MsdSolver::Dense, MsdSolver::Iterative}) {
    const Matrix z = testutil::random_matrix(60, 4, rng);
    std::vector<int> y(60);
    for (int& l : y) l = int(rng() % 3);
    MsdConfig cfg = dense_cfg();
    cfg.solver = s;
    const MsdReport r = compute_msd(z, y, cfg);
    const InputLaplacian il = build_knn_laplacian(z, cfg.manifold);
    const linalg::SparseOperator lz(il.laplacian);
    const linalg::ShiftedOperator lz_eps(lz, r.epsilon_used);
    const LabelLaplacianOp ly(y);
    CHECK(linalg::rayleigh_quotient(ly, lz_eps, r.direction) == doctest::Approx(r.lambda_max).epsilon(1e-10));
  }
}

TEST_CASE("scaling, rotation and permutation invariance") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t m = 30, d = trial % 2 ? 16 : 3;
    const Matrix z = testutil::random_matrix(m, d, rng);
    std::vector<int> y(m);
    for (int& l : y) l = int(rng() % 5);
    const MsdConfig cfg = dense_cfg();
    const double base = compute_msd(z, y, cfg).lambda_max;
    CHECK(std::abs(compute_msd(2.0 * z, y, cfg).lambda_max - base) <= 1e-8);
    CHECK(std::abs(compute_msd(0.5 * z, y, cfg).lambda_max - base) <= 1e-8);

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(testutil::to_eigen(testutil::random_matrix(d, d, rng)));
    const Eigen::MatrixXd q = qr.householderQ();
    Matrix o(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) o(i, j) = q(i, j);
    CHECK(std::abs(compute_msd(linalg::matmul(z, o), y, cfg).lambda_max - base) <= 1e-8);

    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> py(m);
    for (std::size_t i = 0; i < m; ++i) py[i] = y[perm[i]];
    CHECK(std::abs(compute_msd(linalg::select_rows(z, perm), py, cfg).lambda_max - base) <= 1e-8);
  }
}

TEST_CASE("dimension independence") {
  std::mt19937_64 rng(9);
  for (std::size_t d : {1u, 2u, 7u, 40u}) {
    const Matrix z = testutil::random_matrix(25, d, rng);
    std::vector<int> y(25);
    for (int& l : y) l = int(rng() % 4);
    const MsdReport r = compute_msd(z, y, dense_cfg());
    CHECK(std::isfinite(r.lambda_max));
    CHECK(r.lambda_max >= 0.0);
  }
}

TEST_CASE("dense and iterative agree") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 20 + rng() % 180;
    const Matrix z = testutil::random_matrix(m, 5, rng);
    std::vector<int> y(m);
    for (int& l : y) l = int(rng() % 3);
    MsdConfig cfg = dense_cfg();
    const double dense = compute_msd(z, y, cfg).lambda_max;
    cfg.solver = MsdSolver::Iterative;
    const MsdReport it = compute_msd(z, y, cfg);
    CHECK(it.converged);
    CHECK(std::abs(it.lambda_max - dense) / dense <= 1e-5);
  }
}

TEST_CASE("dense-auto switches on the cap") {
  std::mt19937_64 rng(11);
  const Matrix z = testutil::random_matrix(40, 3, rng);
  std::vector<int> y(40);
  for (int& l : y) l = int(rng() % 2);
  MsdConfig cfg = dense_cfg();
  cfg.solver = MsdSolver::DenseAuto;
  CHECK(compute_msd(z, y, cfg).solver == "dense");
  cfg.dense_cap = 30;
  CHECK(compute_msd(z, y, cfg).solver == "iterative");
}

TEST_CASE("alignment gain") {
  const GraphBundle b = small_sbm(1);
  const GsoLibrary lib(b);
  MsdConfig cfg;
  cfg.solver = MsdSolver::Dense;
  const MsdReport id = alignment_gain(lib, std::nullopt, cfg);
  CHECK(*id.alignment_gain == 0.0);
  const MsdReport r = alignment_gain(lib, GsoKind::Ahat, cfg);
  const double base = msd_for_gso(lib, std::nullopt, cfg).lambda_max;
  const double with = msd_for_gso(lib, GsoKind::Ahat, cfg).lambda_max;
  CHECK(*r.baseline_lambda == base);
  CHECK(std::abs(*r.alignment_gain - (with - base)) <= 1e-12);
  CHECK(r.m == int(b.nodes_in(Split::Val).size()));
}

TEST_CASE("rank_gsos ordering and ties") {
  const GraphBundle b = small_sbm(2);
  const GsoLibrary lib(b);
  MsdConfig cfg;
  const std::vector<GsoKind> one{GsoKind::Q};
  CHECK(rank_gsos(lib, one, cfg).size() == 1);
  const auto all = rank_gsos(lib, kAllGsoKinds, cfg);
  REQUIRE(all.size() == 7);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].lambda_max <= all[i].lambda_max);
  CHECK_THROWS(rank_gsos(lib, std::vector<GsoKind>{}, cfg));

  // On a cycle, L_rw = L/2 and H = A/2 exactly: the binary k-NN graphs and
  // therefore λ coincide, so the tie order is by name.
  const GraphBundle c = cycle(40);
  const GsoLibrary clib(c);
  const std::vector<GsoKind> tied{GsoKind::H, GsoKind::Lrw, GsoKind::L, GsoKind::A};
  const auto ranked = rank_gsos(clib, tied, cfg);
  CHECK(ranked[0].lambda_max == ranked[1].lambda_max);
  std::vector<std::string> a_group, l_group;
  for (const auto& r : ranked) (r.gso[0] == 'L' ? l_group : a_group).push_back(r.gso);
  CHECK(a_group == std::vector<std::string>{"A", "H"});
  CHECK(l_group == std::vector<std::string>{"L", "L_rw"});
}

TEST_CASE("minmax normalization") {
  CHECK(minmax_normalize(std::vector<double>{1, 3, 5}) == std::vector<double>{0, 0.5, 1});
  CHECK(minmax_normalize(std::vector<double>{7, 7}) == std::vector<double>{0.5, 0.5});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<double> v(20);
  for (double& x : v) x = u(rng);
  const auto out = minmax_normalize(v);
  std::vector<int> ia(20), ib(20);
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::sort(ia.begin(), ia.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::sort(ib.begin(), ib.end(), [&](int a, int b) { return out[a] < out[b]; });
  CHECK(ia == ib);
  for (double x : out) CHECK((x >= 0.0 && x <= 1.0));
}

TEST_CASE("complexity term") {
  CHECK(complexity_term(0.0, 5) == 0.0);
  CHECK(complexity_term(4.0, 16) == 1.0);
  CHECK(complexity_term(1.0, 1) == 2.0);
}

TEST_CASE("config validation") {
  MsdConfig cfg;
  cfg.epsilon_rel = 0.0;
  CHECK_THROWS_AS(validate_msd_config(cfg), std::invalid_argument);
  cfg = MsdConfig{};
  cfg.tol = -1.0;
  CHECK_THROWS_AS(validate_msd_config(cfg), std::invalid_argument);
  CHECK(parse_msd_solver("dense-auto") == MsdSolver::DenseAuto);
  CHECK_THROWS(parse_msd_solver("lanczos"));
}

TEST_CASE("stability: zero perturbation and rbf requirement") {
  const GraphBundle b = small_sbm(3);
  const GsoLibrary lib(b);
  MsdConfig cfg;
  cfg.solver = MsdSolver::Dense;
  const std::vector<double> deltas{0.0, 0.05};
  CHECK_THROWS_AS(stability_experiment(lib, GsoKind::Ahat, deltas, 3, 1, cfg), std::invalid_argument);
  cfg.manifold.mode = ManifoldMode::Rbf;
  const auto rows = stability_experiment(lib, GsoKind::Ahat, deltas, 3, 1, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].trials_ok == 3);
  for (double v : rows[0].abs_changes) CHECK(v == 0.0);
  CHECK(rows[0].mean_abs_change == 0.0);
  CHECK(rows[1].mean_abs_change > 0.0);
}

TEST_CASE("empty subset is an input error") {
  GraphBundle b = small_sbm(4);
  for (auto& s : b.split)
    if (s == Split::Val) s = Split::Test;
  const GsoLibrary lib(b);
  CHECK_THROWS_AS(msd_for_gso(lib, GsoKind::A, MsdConfig{}), InputError);
}

}  // TEST_SUITE
