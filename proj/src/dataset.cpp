// SPDX-License-Identifier: Apache-2.0
#include "ness/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "ness/error.hpp"
#include "ness/rng.hpp"

namespace ness {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  return lines;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line + 1) + ": " + what);
}

template <typename T>
T parse_number(std::string_view tok, const std::filesystem::path& path, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    malformed(path, line, "cannot parse '" + std::string(tok) + "'");
  return value;
}

void write_double(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out << buf;
}

}  // namespace

DatasetBundle load_dataset(const DatasetPaths& paths, std::string name) {
  const auto feature_lines = read_lines(paths.features);
  if (feature_lines.empty()) throw DataError(paths.features.string() + ": no nodes");
  std::size_t dim = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < feature_lines.size(); ++i) {
    const auto toks = tokens(feature_lines[i]);
    if (toks.empty()) malformed(paths.features, i, "empty feature row");
    if (i == 0) dim = toks.size();
    if (toks.size() != dim)
      malformed(paths.features, i, "expected " + std::to_string(dim) + " values, got " + std::to_string(toks.size()));
    for (auto t : toks) values.push_back(parse_number<double>(t, paths.features, i));
  }
  const std::size_t n = feature_lines.size();
  Matrix features(n, dim);
  std::copy(values.begin(), values.end(), features.data());

  std::vector<Edge> edges;
  const auto edge_lines = read_lines(paths.edges);
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    const auto toks = tokens(edge_lines[i]);
    if (toks.size() != 2) malformed(paths.edges, i, "expected two node ids");
    const auto u = parse_number<std::uint64_t>(toks[0], paths.edges, i);
    const auto v = parse_number<std::uint64_t>(toks[1], paths.edges, i);
    if (u >= n || v >= n)
      malformed(paths.edges, i, "node id out of range for " + std::to_string(n) + " feature rows");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }

  std::optional<std::vector<int>> labels;
  if (paths.labels) {
    const auto label_lines = read_lines(*paths.labels);
    std::vector<int> l;
    for (std::size_t i = 0; i < label_lines.size(); ++i) {
      const auto toks = tokens(label_lines[i]);
      if (toks.size() != 1) malformed(*paths.labels, i, "expected one label");
      l.push_back(parse_number<int>(toks[0], *paths.labels, i));
    }
    if (l.size() != n)
      throw DataError(paths.labels->string() + ": " + std::to_string(l.size()) + " labels for " +
                      std::to_string(n) + " nodes");
    labels = std::move(l);
  }

  std::string source = paths.features.string() + "," + paths.edges.string();
  if (paths.labels) source += "," + paths.labels->string();
  if (name.empty()) name = paths.features.parent_path().filename().string();
  return {build_graph(std::move(features), edges, std::move(labels)), std::move(name), std::move(source)};
}

void export_dataset(const Graph& graph, const DatasetPaths& paths) {
  {
    std::ofstream out(paths.features);
    if (!out) throw DataError("cannot write " + paths.features.string());
    for (std::size_t r = 0; r < graph.num_nodes(); ++r) {
      const auto row = graph.features().row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ' ';
        write_double(out, row[c]);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(paths.edges);
    if (!out) throw DataError("cannot write " + paths.edges.string());
    for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
  }
  if (paths.labels && graph.labels()) {
    std::ofstream out(*paths.labels);
    if (!out) throw DataError("cannot write " + paths.labels->string());
    for (int l : *graph.labels()) out << l << '\n';
  }
}

DatasetPaths dataset_paths_in(const std::filesystem::path& dir, bool with_labels) {
  DatasetPaths p{dir / "features.txt", dir / "edges.txt", std::nullopt};
  if (with_labels) p.labels = dir / "labels.txt";
  return p;
}

DatasetBundle generate_sbm(const SbmParams& params) {
  if (params.block_sizes.empty()) throw std::invalid_argument("generate_sbm: no blocks");
  for (auto s : params.block_sizes)
    if (s == 0) throw std::invalid_argument("generate_sbm: block sizes must be positive");
  for (double p : {params.intra_p, params.inter_p})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_sbm: probability outside [0, 1]");
  if (params.feature_dim < params.block_sizes.size())
    throw std::invalid_argument("generate_sbm: feature_dim must be at least the number of blocks");
  if (params.feature_noise < 0.0) throw std::invalid_argument("generate_sbm: negative feature_noise");

  std::vector<int> labels;
  for (std::size_t b = 0; b < params.block_sizes.size(); ++b)
    labels.insert(labels.end(), params.block_sizes[b], static_cast<int>(b));
  const std::size_t n = labels.size();

  Rng edge_rng = make_stream(params.seed, "sbm-edges");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? params.intra_p : params.inter_p;
      if (unit(edge_rng) < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  }

  Rng feature_rng = make_stream(params.seed, "sbm-features");
  Matrix features(n, params.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < params.feature_dim; ++c) {
      const double noise = params.feature_noise > 0.0 ? params.feature_noise * unit(feature_rng) : 0.0;
      features(i, c) = (static_cast<int>(c) == labels[i] ? 1.0 : 0.0) + noise;
    }
  }

  std::ostringstream src;
  src << "sbm blocks=";
  for (std::size_t b = 0; b < params.block_sizes.size(); ++b) src << (b ? "," : "") << params.block_sizes[b];
  src << " intra_p=" << params.intra_p << " inter_p=" << params.inter_p << " feature_dim=" << params.feature_dim
      << " feature_noise=" << params.feature_noise << " seed=" << params.seed;
  return {build_graph(std::move(features), edges, std::move(labels)), "sbm", src.str()};
}

}  // namespace ness
