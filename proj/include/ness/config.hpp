// SPDX-License-Identifier: Apache-2.0
#pragma once

// Training configuration and its flat key=value text form.
//
//   # comment
//   mode = ness          # ness | sgae | fgae | ds | dres
//   k = 4
//   encoder = gnae       # gcn | lin | gnae
//   ...
//
// Unknown keys are rejected. Keys mirror the TrainConfig fields.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "ness/encoders.hpp"

namespace ness {

enum class TrainMode { Ness, Sgae, Fgae, Ds, Dres };
enum class ReconTarget { Subgraph, Full };
enum class Selection { ValLoss, ValAuc };
enum class FeatureNorm { None, Row };

std::string_view to_string(TrainMode m);
std::string_view to_string(ReconTarget t);
std::string_view to_string(Selection s);
std::string_view to_string(FeatureNorm f);
TrainMode parse_train_mode(std::string_view text);

struct TrainConfig {
  TrainMode mode = TrainMode::Ness;
  std::size_t k = 2;
  double ds_fraction = 0.5;
  EncoderKind encoder = EncoderKind::Gnae;
  bool use_bias = false;
  std::size_t hidden_dim = 64;
  std::size_t out_dim = 32;
  int alpha = 0;
  double tau = 0.5;
  bool in_view_negatives = true;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;
  double weight_decay = 0.0;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;
  double drop_p = 0.2;
  ReconTarget recon_target = ReconTarget::Subgraph;
  Selection selection = Selection::ValLoss;
  FeatureNorm feature_norm = FeatureNorm::None;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Applies one key=value setting. Throws std::invalid_argument.
void apply_setting(TrainConfig& config, std::string_view key, std::string_view value);
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path);
/// Every field, one key = value per line, in declaration order.
std::string format_config(const TrainConfig& config);

}  // namespace ness
