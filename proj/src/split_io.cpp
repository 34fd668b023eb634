// SPDX-License-Identifier: Apache-2.0
#include "ness/split_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ness/error.hpp"
#include "ness/hash.hpp"

namespace ness {
namespace {

using Json = nlohmann::ordered_json;

Json edges_json(const EdgeSet& edges) {
  Json a = Json::array();
  for (const Edge& e : edges) a.push_back(Json::array({e.u, e.v}));
  return a;
}

EdgeSet edges_from(const Json& a, std::size_t num_nodes, const char* what) {
  if (!a.is_array()) throw DataError(std::string("split file: '") + what + "' is not an array");
  std::vector<Edge> v;
  v.reserve(a.size());
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned())
      throw DataError(std::string("split file: malformed pair in '") + what + "'");
    const auto u = p[0].get<std::uint64_t>();
    const auto w = p[1].get<std::uint64_t>();
    if (u >= num_nodes || w >= num_nodes)
      throw DataError(std::string("split file: node id out of range in '") + what + "'");
    v.push_back({static_cast<NodeId>(u), static_cast<NodeId>(w)});
  }
  try {
    return EdgeSet(std::move(v));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("split file: '") + what + "': " + e.what());
  }
}

Json body(const Split& split, const Partition& partition, std::size_t num_nodes) {
  Json j;
  j["version"] = kSplitFormatVersion;
  j["num_nodes"] = num_nodes;
  j["seed"] = split.seed;
  j["train"] = edges_json(split.train);
  j["val_pos"] = edges_json(split.val_pos);
  j["val_neg"] = edges_json(split.val_neg);
  j["test_pos"] = edges_json(split.test_pos);
  j["test_neg"] = edges_json(split.test_neg);
  Json parts = Json::array();
  for (const auto& sg : partition.subgraphs) parts.push_back(edges_json(sg.edges));
  j["partition"] = std::move(parts);
  return j;
}

std::pair<Split, Partition> from_json(const Json& j);

}  // namespace

std::string serialize_split(const Split& split, const Partition& partition, std::size_t num_nodes) {
  Json j = body(split, partition, num_nodes);
  const std::string digest = sha256_hex(j.dump());
  j["checksum"] = digest;
  return j.dump() + "\n";
}

std::pair<Split, Partition> parse_split(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("split file: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version")) throw DataError("split file: missing version");
  if (j["version"] != kSplitFormatVersion)
    throw DataError("split file: unsupported version " + j["version"].dump());
  for (const char* key : {"num_nodes", "train", "val_pos", "val_neg", "test_pos", "test_neg", "partition"})
    if (!j.contains(key)) throw DataError(std::string("split file: missing '") + key + "'");

  if (j.contains("checksum")) {
    const std::string stored = j["checksum"].get<std::string>();
    Json copy = j;
    copy.erase("checksum");
    if (sha256_hex(copy.dump()) != stored) throw DataError("split file: checksum mismatch");
  }

  try {
    return from_json(j);
  } catch (const Json::exception& e) {
    throw DataError(std::string("split file: malformed content: ") + e.what());
  }
}

namespace {

std::pair<Split, Partition> from_json(const Json& j) {
  const auto n = j["num_nodes"].get<std::size_t>();
  Split s;
  s.seed = j.value("seed", std::uint64_t{0});
  s.train = edges_from(j["train"], n, "train");
  s.val_pos = edges_from(j["val_pos"], n, "val_pos");
  s.val_neg = edges_from(j["val_neg"], n, "val_neg");
  s.test_pos = edges_from(j["test_pos"], n, "test_pos");
  s.test_neg = edges_from(j["test_neg"], n, "test_neg");
  Partition p;
  const auto& parts = j["partition"];
  if (!parts.is_array()) throw DataError("split file: 'partition' is not an array");
  for (std::size_t k = 0; k < parts.size(); ++k)
    p.subgraphs.push_back(make_subgraph(k, n, edges_from(parts[k], n, "partition")));
  return {std::move(s), std::move(p)};
}

}  // namespace

void save_split(const Split& split, const Partition& partition, std::size_t num_nodes,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_split(split, partition, num_nodes);
}

std::pair<Split, Partition> load_split(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_split(ss.str());
}

}  // namespace ness
