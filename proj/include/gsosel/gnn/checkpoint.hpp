#pragma once

#include <cstdint>
#include <filesystem>

#include "gsosel/gnn/model.hpp"

namespace gsosel::gnn {

struct Checkpoint {
  GnnModel model;
  std::uint64_t seed = 0;
};

/// One JSON header line (dims, GSO kinds, seed, Björck iterations) followed
/// by every weight matrix as row-major little-endian float64, layers first,
/// then the readout.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

/// Throws InputError on a malformed or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gsosel::gnn
