#include "gsosel/bundle.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gsosel/errors.hpp"

namespace gsosel {

namespace fs = std::filesystem;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view token) {
  if (token == "train") return Split::Train;
  if (token == "val") return Split::Val;
  if (token == "test") return Split::Test;
  throw InputError("invalid split tag '" + std::string(token) + "'");
}

std::vector<int> GraphBundle::nodes_in(Split s) const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (split[static_cast<std::size_t>(i)] == s) out.push_back(i);
  return out;
}

void check_invariants(const GraphBundle& b) {
  if (b.n < 0 || b.d < 0 || b.c < 0) throw InputError("negative dimension in bundle");
  if (b.features.rows() != static_cast<std::size_t>(b.n) ||
      b.features.cols() != static_cast<std::size_t>(b.d))
    throw InputError("feature matrix shape does not match n x d");
  if (b.labels.size() != static_cast<std::size_t>(b.n)) throw InputError("label count != n");
  if (b.split.size() != static_cast<std::size_t>(b.n)) throw InputError("split count != n");
  for (int y : b.labels)
    if (y < 0 || y >= b.c) throw InputError("label out of range [0, c)");
  if (!linalg::all_finite(b.features)) throw InputError("features contain NaN or Inf");
  for (std::size_t k = 0; k < b.edges.size(); ++k) {
    const Edge& e = b.edges[k];
    if (e.u < 0 || e.v >= b.n || e.v < 0 || e.u >= b.n) throw InputError("endpoint out of range");
    if (e.u >= e.v) throw InputError("edge not canonical (need u < v, no self-loops)");
    if (k > 0 && !(b.edges[k - 1] < e)) throw InputError("edges not sorted and unique");
  }
}

std::vector<Edge> canonicalize_edges(std::vector<std::pair<int, int>> raw, int* self_loops,
                                     int* duplicates) {
  int loops = 0;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw) {
    if (u == v) {
      ++loops;
      continue;
    }
    edges.push_back(u < v ? Edge{u, v} : Edge{v, u});
  }
  std::sort(edges.begin(), edges.end());
  const auto before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (self_loops) *self_loops = loops;
  if (duplicates) *duplicates = static_cast<int>(before - edges.size());
  return edges;
}

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  // Tolerate trailing blank lines only.
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const std::string& where) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw InputError("non-numeric token '" + std::string(token) + "' in " + where);
  return value;
}

void expect_rows(const std::vector<std::string>& lines, int n, const std::string& file) {
  if (lines.size() != static_cast<std::size_t>(n))
    throw InputError("row-count mismatch: " + file + " has " + std::to_string(lines.size()) +
                     " rows, expected n=" + std::to_string(n));
}

linalg::Matrix read_features_f32(const fs::path& path, int n, int d) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing file: " + path.string());
  const auto expected = static_cast<std::uintmax_t>(n) * static_cast<std::uintmax_t>(d) * 4u;
  if (fs::file_size(path) != expected)
    throw InputError("row-count mismatch: features.f32 has " + std::to_string(fs::file_size(path)) +
                     " bytes, expected " + std::to_string(expected));
  linalg::Matrix x(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
  std::vector<unsigned char> buf(static_cast<std::size_t>(expected));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * k]) |
                         (static_cast<std::uint32_t>(buf[4 * k + 1]) << 8) |
                         (static_cast<std::uint32_t>(buf[4 * k + 2]) << 16) |
                         (static_cast<std::uint32_t>(buf[4 * k + 3]) << 24);
    x.data()[k] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return x;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

}  // namespace

LoadedBundle load_bundle(const fs::path& dir) {
  LoadedBundle result;
  GraphBundle& b = result.bundle;

  const fs::path meta_path = dir / "meta.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw InputError("missing file: " + meta_path.string());
  try {
    const auto meta = nlohmann::json::parse(meta_in);
    b.n = meta.at("n").get<int>();
    b.d = meta.at("d").get<int>();
    b.c = meta.at("c").get<int>();
    b.name = meta.value("name", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid meta.json: " + std::string(e.what()));
  }
  if (b.n < 0 || b.d < 0 || b.c < 1) throw InputError("meta.json: need n >= 0, d >= 0, c >= 1");

  // Edges
  std::vector<std::pair<int, int>> raw;
  const auto edge_lines = read_lines(dir / "edges.tsv");
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    const auto fields = split_fields(edge_lines[i]);
    if (fields.empty()) continue;
    const std::string where = "edges.tsv line " + std::to_string(i + 1);
    if (fields.size() != 2) throw InputError("expected two endpoints in " + where);
    const int u = parse_number<int>(fields[0], where);
    const int v = parse_number<int>(fields[1], where);
    if (u < 0 || v < 0 || u >= b.n || v >= b.n)
      throw InputError("endpoint out of range in " + where + " (n=" + std::to_string(b.n) + ")");
    raw.emplace_back(u, v);
  }
  b.edges = canonicalize_edges(std::move(raw), &result.stats.self_loops_removed,
                               &result.stats.duplicate_edges_removed);

  // Features
  if (fs::exists(dir / "features.f32")) {
    b.features = read_features_f32(dir / "features.f32", b.n, b.d);
    result.stats.features_from_f32 = true;
  } else {
    const auto lines = read_lines(dir / "features.tsv");
    expect_rows(lines, b.n, "features.tsv");
    b.features = linalg::Matrix(static_cast<std::size_t>(b.n), static_cast<std::size_t>(b.d));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto fields = split_fields(lines[i]);
      const std::string where = "features.tsv line " + std::to_string(i + 1);
      if (fields.size() != static_cast<std::size_t>(b.d))
        throw InputError("expected " + std::to_string(b.d) + " values in " + where + ", got " +
                         std::to_string(fields.size()));
      for (std::size_t j = 0; j < fields.size(); ++j)
        b.features(i, j) = parse_number<double>(fields[j], where);
    }
  }

  // Labels
  {
    const auto lines = read_lines(dir / "labels.tsv");
    expect_rows(lines, b.n, "labels.tsv");
    b.labels.resize(static_cast<std::size_t>(b.n));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto fields = split_fields(lines[i]);
      const std::string where = "labels.tsv line " + std::to_string(i + 1);
      if (fields.size() != 1) throw InputError("expected one label in " + where);
      b.labels[i] = parse_number<int>(fields[0], where);
      if (b.labels[i] < 0 || b.labels[i] >= b.c)
        throw InputError("label out of range in " + where);
    }
  }

  // Split
  {
    const auto lines = read_lines(dir / "split.tsv");
    expect_rows(lines, b.n, "split.tsv");
    b.split.resize(static_cast<std::size_t>(b.n));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto fields = split_fields(lines[i]);
      if (fields.size() != 1)
        throw InputError("expected one split tag in split.tsv line " + std::to_string(i + 1));
      b.split[i] = parse_split(fields[0]);
    }
  }

  check_invariants(b);
  return result;
}

void save_bundle(const GraphBundle& b, const fs::path& dir, FeatureFormat format) {
  check_invariants(b);
  fs::create_directories(dir);

  nlohmann::ordered_json meta;
  meta["name"] = b.name;
  meta["n"] = b.n;
  meta["d"] = b.d;
  meta["c"] = b.c;
  write_text(dir / "meta.json", meta.dump(2) + "\n");

  std::string edges;
  for (const Edge& e : b.edges) edges += std::to_string(e.u) + "\t" + std::to_string(e.v) + "\n";
  write_text(dir / "edges.tsv", edges);

  if (format == FeatureFormat::F32) {
    std::string blob;
    blob.reserve(b.features.size() * 4);
    for (double v : b.features.data()) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int k = 0; k < 4; ++k) blob.push_back(static_cast<char>((bits >> (8 * k)) & 0xFFu));
    }
    write_text(dir / "features.f32", blob);
    fs::remove(dir / "features.tsv");
  } else {
    std::string feats;
    for (std::size_t i = 0; i < b.features.rows(); ++i) {
      const auto row = b.features.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) feats += '\t';
        feats += format_double(row[j]);
      }
      feats += '\n';
    }
    write_text(dir / "features.tsv", feats);
    fs::remove(dir / "features.f32");
  }

  std::string labels;
  for (int y : b.labels) labels += std::to_string(y) + "\n";
  write_text(dir / "labels.tsv", labels);

  std::string split;
  for (Split s : b.split) split += std::string(to_string(s)) + "\n";
  write_text(dir / "split.tsv", split);
}

BundleDiagnostics validate_bundle(const GraphBundle& b) {
  BundleDiagnostics diag;
  diag.nodes = b.n;
  diag.edges = static_cast<int>(b.edges.size());

  std::vector<int> parent(static_cast<std::size_t>(b.n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<int> degree(static_cast<std::size_t>(b.n), 0);
  int same = 0;
  for (const Edge& e : b.edges) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
    const int ru = find(e.u), rv = find(e.v);
    if (ru != rv) parent[static_cast<std::size_t>(ru)] = rv;
    if (b.labels[static_cast<std::size_t>(e.u)] == b.labels[static_cast<std::size_t>(e.v)]) ++same;
  }
  for (int i = 0; i < b.n; ++i) {
    if (find(i) == i) ++diag.components;
    const int deg = degree[static_cast<std::size_t>(i)];
    ++diag.degree_histogram[deg];
    if (deg == 0) ++diag.isolated_nodes;
  }
  diag.class_counts.assign(static_cast<std::size_t>(std::max(b.c, 0)), 0);
  for (int y : b.labels)
    if (y >= 0 && y < b.c) ++diag.class_counts[static_cast<std::size_t>(y)];
  for (Split s : b.split) {
    if (s == Split::Train) ++diag.train;
    if (s == Split::Val) ++diag.val;
    if (s == Split::Test) ++diag.test;
  }
  if (!b.edges.empty()) diag.homophily = static_cast<double>(same) / static_cast<double>(b.edges.size());
  return diag;
}

}  // namespace gsosel
