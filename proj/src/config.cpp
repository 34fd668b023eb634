// SPDX-License-Identifier: Apache-2.0
#include "ness/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ness/error.hpp"

namespace ness {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw std::invalid_argument("config: invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

template <typename T>
T number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad(key, value);
  return out;
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad(key, value);
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::Ness: return "ness";
    case TrainMode::Sgae: return "sgae";
    case TrainMode::Fgae: return "fgae";
    case TrainMode::Ds: return "ds";
    case TrainMode::Dres: return "dres";
  }
  return "?";
}

std::string_view to_string(ReconTarget t) { return t == ReconTarget::Subgraph ? "subgraph" : "full"; }
std::string_view to_string(Selection s) { return s == Selection::ValLoss ? "val_loss" : "val_auc"; }
std::string_view to_string(FeatureNorm f) { return f == FeatureNorm::None ? "none" : "row"; }

TrainMode parse_train_mode(std::string_view text) {
  for (auto m : {TrainMode::Ness, TrainMode::Sgae, TrainMode::Fgae, TrainMode::Ds, TrainMode::Dres})
    if (text == to_string(m)) return m;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected ness|sgae|fgae|ds|dres)");
}

void TrainConfig::validate() const {
  if (alpha != 0 && alpha != 1) throw std::invalid_argument("config: alpha must be 0 or 1");
  if (k == 0) throw std::invalid_argument("config: k must be at least 1");
  if (mode == TrainMode::Dres && k < 2) throw std::invalid_argument("config: dres needs k >= 2");
  if (alpha == 1 && !(mode == TrainMode::Ness || mode == TrainMode::Dres))
    throw std::invalid_argument("config: the contrastive term needs a multi-subgraph mode (ness or dres)");
  if (alpha == 1 && k < 2) throw std::invalid_argument("config: the contrastive term needs k >= 2");
  if (!(ds_fraction > 0.0 && ds_fraction <= 1.0)) throw std::invalid_argument("config: ds_fraction must be in (0, 1]");
  if (!(drop_p >= 0.0 && drop_p < 1.0)) throw std::invalid_argument("config: drop_p must be in [0, 1)");
  if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("config: betas must be in [0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("config: weight_decay must be non-negative");
  if (max_epochs == 0) throw std::invalid_argument("config: max_epochs must be positive");
  if (patience < 3 || patience > 15) throw std::invalid_argument("config: patience must be in [3, 15]");
  if (hidden_dim == 0 || out_dim == 0) throw std::invalid_argument("config: layer widths must be positive");
}

void apply_setting(TrainConfig& c, std::string_view key, std::string_view value) {
  if (key == "mode") c.mode = parse_train_mode(value);
  else if (key == "k") c.k = number<std::size_t>(key, value);
  else if (key == "ds_fraction") c.ds_fraction = number<double>(key, value);
  else if (key == "encoder") c.encoder = parse_encoder_kind(value);
  else if (key == "use_bias") c.use_bias = boolean(key, value);
  else if (key == "hidden_dim") c.hidden_dim = number<std::size_t>(key, value);
  else if (key == "out_dim") c.out_dim = number<std::size_t>(key, value);
  else if (key == "alpha") c.alpha = number<int>(key, value);
  else if (key == "tau") c.tau = number<double>(key, value);
  else if (key == "in_view_negatives") c.in_view_negatives = boolean(key, value);
  else if (key == "lr") c.lr = number<double>(key, value);
  else if (key == "beta1") c.beta1 = number<double>(key, value);
  else if (key == "beta2") c.beta2 = number<double>(key, value);
  else if (key == "eps") c.eps = number<double>(key, value);
  else if (key == "weight_decay") c.weight_decay = number<double>(key, value);
  else if (key == "max_epochs") c.max_epochs = number<std::size_t>(key, value);
  else if (key == "patience") c.patience = number<std::size_t>(key, value);
  else if (key == "drop_p") c.drop_p = number<double>(key, value);
  else if (key == "recon_target") {
    if (value == "subgraph") c.recon_target = ReconTarget::Subgraph;
    else if (value == "full") c.recon_target = ReconTarget::Full;
    else bad(key, value);
  } else if (key == "selection") {
    if (value == "val_loss") c.selection = Selection::ValLoss;
    else if (value == "val_auc") c.selection = Selection::ValAuc;
    else bad(key, value);
  } else if (key == "feature_norm") {
    if (value == "none") c.feature_norm = FeatureNorm::None;
    else if (value == "row") c.feature_norm = FeatureNorm::Row;
    else bad(key, value);
  } else if (key == "seed") c.seed = number<std::uint64_t>(key, value);
  else throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const TrainConfig& c) {
  std::ostringstream o;
  o << "mode = " << to_string(c.mode) << '\n'
    << "k = " << c.k << '\n'
    << "ds_fraction = " << fmt_double(c.ds_fraction) << '\n'
    << "encoder = " << to_string(c.encoder) << '\n'
    << "use_bias = " << (c.use_bias ? "true" : "false") << '\n'
    << "hidden_dim = " << c.hidden_dim << '\n'
    << "out_dim = " << c.out_dim << '\n'
    << "alpha = " << c.alpha << '\n'
    << "tau = " << fmt_double(c.tau) << '\n'
    << "in_view_negatives = " << (c.in_view_negatives ? "true" : "false") << '\n'
    << "lr = " << fmt_double(c.lr) << '\n'
    << "beta1 = " << fmt_double(c.beta1) << '\n'
    << "beta2 = " << fmt_double(c.beta2) << '\n'
    << "eps = " << fmt_double(c.eps) << '\n'
    << "weight_decay = " << fmt_double(c.weight_decay) << '\n'
    << "max_epochs = " << c.max_epochs << '\n'
    << "patience = " << c.patience << '\n'
    << "drop_p = " << fmt_double(c.drop_p) << '\n'
    << "recon_target = " << to_string(c.recon_target) << '\n'
    << "selection = " << to_string(c.selection) << '\n'
    << "feature_norm = " << to_string(c.feature_norm) << '\n'
    << "seed = " << c.seed << '\n';
  return o.str();
}

}  // namespace ness
