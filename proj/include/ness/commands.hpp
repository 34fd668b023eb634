// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ness/config.hpp"
#include "ness/trainer.hpp"

namespace ness {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumerical = 4 };

/// Per-epoch CSV: epoch,L_t,L_r,L_c,val_loss,val_auc,wall_ms. The wall_ms
/// column is 0 unless `with_wall_time` is set, so repeated runs are
/// byte-identical.
std::string metrics_csv(const TrainResult& result, bool with_wall_time = false);

/// One line of a comparison matrix: "name key=value key=value ...".
struct MatrixEntry {
  std::string name;
  TrainConfig config;
};

/// Blank lines and lines starting with '#' are skipped. Throws
/// std::invalid_argument naming the line on a bad setting.
std::vector<MatrixEntry> parse_config_matrix(const std::string& text);

/// nessbench entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ness
