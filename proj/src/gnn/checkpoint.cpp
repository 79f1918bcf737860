#include "gsosel/gnn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gsosel/errors.hpp"

namespace gsosel::gnn {

namespace {

constexpr const char* kFormat = "gsosel-gnn";
constexpr int kVersion = 1;

void write_blob(std::ofstream& out, const linalg::Matrix& m) {
  for (double v : m.data()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xFFu);
    out.write(bytes, 8);
  }
}

linalg::Matrix read_blob(std::ifstream& in, std::size_t rows, std::size_t cols) {
  linalg::Matrix m(rows, cols);
  for (double& v : m.data()) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw InputError("checkpoint: truncated weights");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
    v = std::bit_cast<double>(bits);
  }
  return m;
}

nlohmann::ordered_json shape(const linalg::Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}};
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  check_model(ckpt.model);
  nlohmann::ordered_json header;
  header["format"] = kFormat;
  header["version"] = kVersion;
  header["seed"] = ckpt.seed;
  header["bjorck_iters"] = ckpt.model.bjorck_iters;
  header["layers"] = nlohmann::ordered_json::array();
  for (const GnnLayer& l : ckpt.model.layers) {
    auto entry = shape(l.w_raw);
    entry["gso"] = gso_name(l.gso);
    header["layers"].push_back(entry);
  }
  header["readout"] = ckpt.model.readout ? shape(*ckpt.model.readout) : nlohmann::ordered_json();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out << header.dump() << '\n';
  for (const GnnLayer& l : ckpt.model.layers) write_blob(out, l.w_raw);
  if (ckpt.model.readout) write_blob(out, *ckpt.model.readout);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError("checkpoint: missing header");
  Checkpoint ckpt;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != kFormat || header.at("version").get<int>() != kVersion)
      throw InputError("checkpoint: unsupported format");
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.model.bjorck_iters = header.at("bjorck_iters").get<int>();
    for (const auto& entry : header.at("layers")) {
      GnnLayer layer;
      const auto name = entry.at("gso").get<std::string>();
      if (name != "identity") layer.gso = parse_gso_kind(name);
      layer.w_raw = linalg::Matrix(entry.at("rows").get<std::size_t>(), entry.at("cols").get<std::size_t>());
      ckpt.model.layers.push_back(std::move(layer));
    }
    const auto& readout = header.at("readout");
    if (!readout.is_null())
      ckpt.model.readout =
          linalg::Matrix(readout.at("rows").get<std::size_t>(), readout.at("cols").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("checkpoint: bad header: " + std::string(e.what()));
  }
  for (GnnLayer& l : ckpt.model.layers) l.w_raw = read_blob(in, l.w_raw.rows(), l.w_raw.cols());
  if (ckpt.model.readout)
    ckpt.model.readout = read_blob(in, ckpt.model.readout->rows(), ckpt.model.readout->cols());
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("checkpoint: trailing bytes");
  check_model(ckpt.model);
  return ckpt;
}

}  // namespace gsosel::gnn
