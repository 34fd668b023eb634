// SPDX-License-Identifier: Apache-2.0
#include "ness/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ness/error.hpp"
#include "ness/hash.hpp"

namespace ness {
namespace {

using Json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "payload assumes a little-endian host");

void append_doubles(std::string& out, const Matrix& m) {
  const auto* bytes = reinterpret_cast<const char*>(m.data());
  out.append(bytes, m.size() * sizeof(double));
}

Json meta_json(const CheckpointMeta& meta) {
  Json j;
  j["config"] = format_config(meta.config);
  j["features"] = meta.dataset.features.generic_string();
  j["edges"] = meta.dataset.edges.generic_string();
  j["labels"] = meta.dataset.labels ? Json(meta.dataset.labels->generic_string()) : Json(nullptr);
  j["dataset_sha256"] = meta.dataset_sha256;
  j["split"] = meta.split_path.generic_string();
  return j;
}

CheckpointMeta parse_meta(const Json& j) {
  CheckpointMeta meta;
  meta.config = parse_config(j.at("config").get<std::string>());
  meta.dataset.features = j.at("features").get<std::string>();
  meta.dataset.edges = j.at("edges").get<std::string>();
  if (!j.at("labels").is_null()) meta.dataset.labels = j.at("labels").get<std::string>();
  meta.dataset_sha256 = j.at("dataset_sha256").get<std::string>();
  meta.split_path = j.at("split").get<std::string>();
  return meta;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  std::string payload;
  const auto tensors = c.params.tensors();
  const auto names = c.params.tensor_names();
  Json shapes = Json::array();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    append_doubles(payload, *tensors[i]);
    shapes.push_back({{"name", names[i]}, {"rows", tensors[i]->rows()}, {"cols", tensors[i]->cols()}});
  }
  Json h;
  h["format"] = "ness-checkpoint";
  h["version"] = kCheckpointVersion;
  h["kind"] = std::string(to_string(c.params.encoder.kind));
  h["use_bias"] = !c.params.encoder.biases.empty();
  h["seed"] = c.seed;
  h["epoch"] = c.epoch;
  h["tensors"] = std::move(shapes);
  h["meta"] = meta_json(c.meta);
  h["payload_sha256"] = sha256_hex(payload);
  h["checksum"] = sha256_hex(h.dump() + payload);
  return h.dump() + "\n" + payload;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw DataError("checkpoint: missing header line");
  const std::string payload = bytes.substr(nl + 1);
  Checkpoint c;
  try {
    Json h = Json::parse(bytes.substr(0, nl));
    if (h.at("format") != "ness-checkpoint") throw DataError("checkpoint: unknown format");
    if (h.at("version") != kCheckpointVersion) throw DataError("checkpoint: unsupported version");
    const std::string checksum = h.at("checksum").get<std::string>();
    h.erase("checksum");
    if (sha256_hex(h.dump() + payload) != checksum) throw DataError("checkpoint: checksum mismatch");
    if (sha256_hex(payload) != h.at("payload_sha256").get<std::string>())
      throw DataError("checkpoint: payload hash mismatch");

    c.seed = h.at("seed").get<std::uint64_t>();
    c.epoch = h.at("epoch").get<std::size_t>();
    c.meta = parse_meta(h.at("meta"));
    const EncoderKind kind = parse_encoder_kind(h.at("kind").get<std::string>());
    const bool use_bias = h.at("use_bias").get<bool>();

    std::size_t n_weights = kind == EncoderKind::Gcn ? 2 : 1;
    c.params.encoder.kind = kind;
    std::vector<Matrix*> slots;
    c.params.encoder.weights.resize(n_weights);
    for (auto& w : c.params.encoder.weights) slots.push_back(&w);
    if (use_bias) {
      c.params.encoder.biases.resize(n_weights);
      for (auto& b : c.params.encoder.biases) slots.push_back(&b);
    }
    slots.push_back(&c.params.projection.w0);
    slots.push_back(&c.params.projection.w1);

    const Json& shapes = h.at("tensors");
    if (shapes.size() != slots.size()) throw DataError("checkpoint: unexpected tensor count");
    std::size_t offset = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto rows = shapes[i].at("rows").get<std::size_t>();
      const auto cols = shapes[i].at("cols").get<std::size_t>();
      const std::size_t n = rows * cols * sizeof(double);
      if (offset + n > payload.size()) throw DataError("checkpoint: truncated payload");
      Matrix m(rows, cols);
      std::memcpy(m.data(), payload.data() + offset, n);
      offset += n;
      *slots[i] = std::move(m);
    }
    if (offset != payload.size()) throw DataError("checkpoint: trailing payload bytes");
    const auto names = c.params.tensor_names();
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (shapes[i].at("name") != names[i]) throw DataError("checkpoint: tensor order mismatch");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_checkpoint(checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

std::string dataset_sha256(const DatasetPaths& paths) {
  std::string joined = sha256_file(paths.features) + sha256_file(paths.edges);
  if (paths.labels) joined += sha256_file(*paths.labels);
  return sha256_hex(joined);
}

}  // namespace ness
