#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gsosel/bundle.hpp"
#include "gsosel/errors.hpp"
#include "helpers.hpp"

using namespace gsosel;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

fs::path write_p2(const std::string& edges, const std::string& labels = "0\n1\n") {
  const fs::path dir = testutil::temp_dir("bundle");
  write(dir / "meta.json", R"({"n": 2, "d": 1, "c": 2, "name": "p2"})");
  write(dir / "edges.tsv", edges);
  write(dir / "features.tsv", "0\n1\n");
  write(dir / "labels.tsv", labels);
  write(dir / "split.tsv", "train\nval\n");
  return dir;
}

std::string error_of(const fs::path& dir) {
  try {
    load_bundle(dir);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("bundle") {

TEST_CASE("minimal P2 bundle loads") {
  const LoadedBundle lb = load_bundle(write_p2("0\t1\n"));
  CHECK(lb.bundle.n == 2);
  CHECK(lb.bundle.edges.size() == 1);
  CHECK(lb.bundle.edges[0] == Edge{0, 1});
  CHECK(lb.bundle.features(1, 0) == 1.0);
  CHECK(lb.bundle.labels == std::vector<int>{0, 1});
  CHECK(lb.stats.duplicate_edges_removed == 0);
}

TEST_CASE("out-of-range endpoint is rejected") {
  CHECK(error_of(write_p2("0\t5\n")).find("endpoint out of range") != std::string::npos);
}

TEST_CASE("duplicate edges in both orientations are merged") {
  const LoadedBundle lb = load_bundle(write_p2("0\t1\n1\t0\n"));
  CHECK(lb.bundle.edges.size() == 1);
  CHECK(lb.stats.duplicate_edges_removed == 1);
}

TEST_CASE("self-loops are stripped and counted") {
  const LoadedBundle lb = load_bundle(write_p2("0\t0\n0\t1\n"));
  CHECK(lb.bundle.edges.size() == 1);
  CHECK(lb.stats.self_loops_removed == 1);
}

TEST_CASE("malformed files are rejected") {
  SUBCASE("missing file") {
    const fs::path dir = write_p2("0\t1\n");
    fs::remove(dir / "labels.tsv");
    CHECK(error_of(dir).find("missing file") != std::string::npos);
  }
  SUBCASE("row-count mismatch") {
    CHECK(error_of(write_p2("0\t1\n", "0\n1\n1\n")).find("row-count mismatch") != std::string::npos);
  }
  SUBCASE("non-numeric feature") {
    const fs::path dir = write_p2("0\t1\n");
    write(dir / "features.tsv", "0\nabc\n");
    CHECK(error_of(dir).find("non-numeric") != std::string::npos);
  }
  SUBCASE("non-finite feature") {
    const fs::path dir = write_p2("0\t1\n");
    write(dir / "features.tsv", "0\nnan\n");
    CHECK_FALSE(error_of(dir).empty());
  }
  SUBCASE("label out of range") { CHECK_FALSE(error_of(write_p2("0\t1\n", "0\n2\n")).empty()); }
  SUBCASE("bad split tag") {
    const fs::path dir = write_p2("0\t1\n");
    write(dir / "split.tsv", "train\ndev\n");
    CHECK_FALSE(error_of(dir).empty());
  }
}

TEST_CASE("features.f32 takes precedence") {
  const fs::path dir = write_p2("0\t1\n");
  const float values[2] = {2.5f, -1.0f};
  std::ofstream f(dir / "features.f32", std::ios::binary);
  f.write(reinterpret_cast<const char*>(values), sizeof values);
  f.close();
  const LoadedBundle lb = load_bundle(dir);
  CHECK(lb.stats.features_from_f32);
  CHECK(lb.bundle.features(0, 0) == 2.5);
  CHECK(lb.bundle.features(1, 0) == -1.0);
}

TEST_CASE("save and load round-trip") {
  SbmConfig cfg;
  cfg.n = 40;
  cfg.c = 3;
  cfg.d = 5;
  cfg.seed = 3;
  const GraphBundle b = generate_sbm(cfg);
  const fs::path dir = testutil::temp_dir("roundtrip");
  save_bundle(b, dir);
  CHECK(load_bundle(dir).bundle == b);

  // f32 storage loses precision, so compare against the rounded features.
  save_bundle(b, dir, FeatureFormat::F32);
  GraphBundle rounded = b;
  for (double& v : rounded.features.data()) v = static_cast<float>(v);
  const LoadedBundle lb = load_bundle(dir);
  CHECK(lb.stats.features_from_f32);
  CHECK(lb.bundle == rounded);
}

TEST_CASE("SBM with p_in=1, p_out=0 gives two cliques") {
  SbmConfig cfg;
  cfg.n = 4;
  cfg.c = 2;
  cfg.p_in = 1.0;
  cfg.p_out = 0.0;
  cfg.d = 2;
  const GraphBundle b = generate_sbm(cfg);
  CHECK(b.edges == std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK(b.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(validate_bundle(b).components == 2);
}

TEST_CASE("SBM edge count is within 4 sigma of the binomial expectation") {
  SbmConfig cfg;
  cfg.n = 200;
  cfg.c = 2;
  cfg.p_in = 0.1;
  cfg.p_out = 0.01;
  cfg.seed = 7;
  const GraphBundle b = generate_sbm(cfg);
  const double pairs_in = 2 * (100.0 * 99.0 / 2.0), pairs_out = 100.0 * 100.0;
  const double mean = 0.1 * pairs_in + 0.01 * pairs_out;
  const double sd = std::sqrt(0.1 * 0.9 * pairs_in + 0.01 * 0.99 * pairs_out);
  CHECK(mean == doctest::Approx(1090.0));
  CHECK(std::abs(double(b.edges.size()) - mean) <= 4 * sd);
}

TEST_CASE("SBM remainder nodes go to the last block") {
  SbmConfig cfg;
  cfg.n = 11;
  cfg.c = 3;
  cfg.d = 3;
  const GraphBundle b = generate_sbm(cfg);
  CHECK(b.labels == std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2});
}

TEST_CASE("SBM is deterministic in its config") {
  SbmConfig cfg;
  cfg.seed = 42;
  const GraphBundle a = generate_sbm(cfg), b = generate_sbm(cfg);
  CHECK(a == b);
  const fs::path da = testutil::temp_dir("det_a"), db = testutil::temp_dir("det_b");
  save_bundle(a, da);
  save_bundle(b, db);
  for (const char* f : {"meta.json", "edges.tsv", "features.tsv", "labels.tsv", "split.tsv"}) {
    std::ifstream fa(da / f), fb(db / f);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
  }
  cfg.seed = 43;
  CHECK_FALSE(generate_sbm(cfg) == a);
}

TEST_CASE("SBM config validation") {
  SbmConfig cfg;
  cfg.p_in = 0.01;
  cfg.p_out = 0.15;
  CHECK_THROWS_AS(generate_sbm(cfg), std::invalid_argument);
  cfg.heterophilic = true;
  CHECK_NOTHROW(generate_sbm(cfg));
}

TEST_CASE("one-hot noisy features") {
  SbmConfig cfg;
  cfg.feature_mode = FeatureMode::OneHotNoisy;
  cfg.flip_probability = 0.0;
  cfg.d = 3;
  const GraphBundle b = generate_sbm(cfg);
  for (int i = 0; i < b.n; ++i)
    for (int j = 0; j < b.d; ++j) CHECK(b.features(i, j) == (j == b.labels[i] ? 1.0 : 0.0));
}

TEST_CASE("homophily of P2") {
  CHECK(*validate_bundle(testutil::p2(0, 1)).homophily == 0.0);
  CHECK(*validate_bundle(testutil::p2(0, 0)).homophily == 1.0);
}

TEST_CASE("validate_bundle reports and leaves its input alone") {
  SbmConfig cfg;
  cfg.seed = 9;
  const GraphBundle b = generate_sbm(cfg);
  const GraphBundle copy = b;
  const BundleDiagnostics d = validate_bundle(b);
  CHECK(b == copy);
  CHECK(d.nodes == 300);
  CHECK(d.edges == int(b.edges.size()));
  CHECK(d.train + d.val + d.test == 300);
  int total = 0;
  for (const auto& [deg, count] : d.degree_histogram) total += count;
  CHECK(total == 300);
  CHECK(d.class_counts == std::vector<int>{100, 100, 100});
  CHECK(*d.homophily > 0.5);
}

}  // TEST_SUITE
