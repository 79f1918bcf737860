#include <doctest.h>

#include <algorithm>

#include "gsosel/gnn/msd_o.hpp"
#include "gsosel/msd.hpp"

using namespace gsosel;

namespace {

GraphBundle sbm(bool heterophilic) {
  SbmConfig cfg;
  cfg.n = 300;
  cfg.c = 3;
  cfg.p_in = heterophilic ? 0.01 : 0.15;
  cfg.p_out = heterophilic ? 0.15 : 0.01;
  cfg.heterophilic = heterophilic;
  cfg.d = 16;
  cfg.mean_separation = 1.0;
  cfg.seed = 0;
  return generate_sbm(cfg);
}

bool is_laplacian(GsoKind k) { return k == GsoKind::L || k == GsoKind::Lrw || k == GsoKind::Lsym; }

}  // namespace

TEST_SUITE("patterns") {

TEST_CASE("homophilic SBM: A_hat ranks ahead of L") {
  const GraphBundle b = sbm(false);
  const GsoLibrary lib(b);
  const std::vector<GsoKind> kinds{GsoKind::Ahat, GsoKind::L};
  const auto ranked = rank_gsos(lib, kinds, MsdConfig{});
  MESSAGE("A_hat vs L: " << ranked[0].gso << " " << ranked[0].lambda_max << ", " << ranked[1].gso << " "
                         << ranked[1].lambda_max);
  CHECK(ranked.front().gso == "A_hat");
}

TEST_CASE("homophilic SBM: MSD-O over {A_hat, L} selects (A_hat, A_hat)") {
  const GraphBundle b = sbm(false);
  const GsoLibrary lib(b);
  const std::vector<GsoKind> kinds{GsoKind::Ahat, GsoKind::L};
  gnn::MsdOConfig cfg;
  const gnn::MsdOResult r = gnn::msd_o_select_and_train(lib, kinds, cfg);
  MESSAGE("selected " << to_string(r.selected[0]) << "," << to_string(r.selected[1]) << " test acc " << r.test_acc);
  CHECK(r.selected == std::vector<GsoKind>{GsoKind::Ahat, GsoKind::Ahat});
}

TEST_CASE("heterophilic SBM: MSD-O picks a Laplacian somewhere") {
  const GraphBundle b = sbm(true);
  const GsoLibrary lib(b);
  gnn::MsdOConfig cfg;
  const gnn::MsdOResult r = gnn::msd_o_select_and_train(lib, kAllGsoKinds, cfg);
  MESSAGE("selected " << to_string(r.selected[0]) << "," << to_string(r.selected[1]) << " test acc " << r.test_acc);
  CHECK(std::any_of(r.selected.begin(), r.selected.end(), is_laplacian));
}

TEST_CASE("stability: doubling delta scales the mean change by 0.5 to 4") {
  const GraphBundle b = sbm(false);
  const GsoLibrary lib(b);
  MsdConfig cfg;
  cfg.manifold.mode = ManifoldMode::Rbf;
  const std::vector<double> deltas{0.02, 0.04};
  const auto rows = stability_experiment(lib, GsoKind::Ahat, deltas, 20, 11, cfg);
  const double ratio = rows[1].mean_abs_change / rows[0].mean_abs_change;
  MESSAGE("ratio " << ratio);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 4.0);
}

}  // TEST_SUITE
