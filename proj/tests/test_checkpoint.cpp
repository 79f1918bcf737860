#include <doctest.h>

#include <fstream>

#include "gsosel/errors.hpp"
#include "gsosel/gnn/checkpoint.hpp"
#include "helpers.hpp"

using namespace gsosel;
using namespace gsosel::gnn;

TEST_SUITE("checkpoint") {

TEST_CASE("save and load round-trip") {
  const std::vector<std::size_t> dims{5, 4, 3};
  const std::vector<std::optional<GsoKind>> gsos{GsoKind::Ahat, std::nullopt};
  Checkpoint ck{make_model(dims, gsos, 3, true, 2), 3};
  ck.model.bjorck_iters = 12;
  const auto path = testutil::temp_dir("ckpt") / "model.bin";
  save_checkpoint(ck, path);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.seed == 3);
  CHECK(back.model.bjorck_iters == 12);
  REQUIRE(back.model.layers.size() == 2);
  CHECK(back.model.layers[0].gso == GsoKind::Ahat);
  CHECK_FALSE(back.model.layers[1].gso.has_value());
  for (std::size_t l = 0; l < 2; ++l) CHECK(back.model.layers[l].w_raw == ck.model.layers[l].w_raw);
  CHECK(*back.model.readout == *ck.model.readout);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("\"format\":\"gsosel-gnn\"") != std::string::npos);
  CHECK(std::filesystem::file_size(path) == header.size() + 1 + 8 * (5 * 4 + 4 * 3 + 3 * 2));
}

TEST_CASE("truncated and padded files are rejected") {
  const std::vector<std::size_t> dims{3, 2};
  const std::vector<std::optional<GsoKind>> gsos{GsoKind::L};
  const auto path = testutil::temp_dir("ckpt_bad") / "model.bin";
  save_checkpoint({make_model(dims, gsos, 1), 1}, path);
  const auto size = std::filesystem::file_size(path);
  {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out << 'x';
  }
  CHECK_THROWS_AS(load_checkpoint(path), InputError);
  std::filesystem::resize_file(path, size - 4);
  CHECK_THROWS_AS(load_checkpoint(path), InputError);
  CHECK_THROWS_AS(load_checkpoint(path.parent_path() / "missing.bin"), InputError);
}

}  // TEST_SUITE
