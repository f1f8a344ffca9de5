// Copyright 2026 The hypernews Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "hypernews/harness.hpp"

namespace hypernews {

/// Trained weights plus the configuration and seed that produced them.
struct SavedModel {
  TrainConfig config;
  std::uint64_t seed = 0;
  ModelParams params;
};

/// JSON with the config echo, the seed and every parameter as
/// {name, rows, cols, data (row-major)}. Doubles round-trip exactly.
void save_params(const std::filesystem::path& path, const ModelParams& params, const TrainConfig& config,
                 std::uint64_t seed);

/// Throws DataError on missing file, malformed JSON, unknown or missing
/// parameter names, or shape mismatches.
SavedModel load_params(const std::filesystem::path& path);

/// One run-log line (no trailing newline):
/// {"run", "epoch", "train_loss", "ce", "cl", "val_acc", "val_f1"}.
std::string epoch_log_json(const EpochLog& row);

/// {accuracy, macro_f1, binary_f1, negative, positive, confusion}.
std::string metrics_json(const MetricsReport& m);

/// Metrics only: per-run test metrics plus accuracy/macro_f1 summaries.
/// Identical for any two protocol runs with equal results, whatever the config.
std::string protocol_metrics_json(const ProtocolReport& report);

/// Config echo, command, variant, per-run detail and summaries.
std::string protocol_report_json(const ProtocolReport& report, const TrainConfig& config, std::string_view command,
                                 std::string_view variant);

/// {"rows": [{"p_thd", "metrics"}...]} in grid order.
std::string sweep_metrics_json(std::span<const SweepRow> rows);
std::string sweep_report_json(std::span<const SweepRow> rows, const TrainConfig& config);

/// {"run", "epoch", "layers": [{"layer", "rows", "cols", "data"}]} for one epoch's H_re.
std::string structures_json(const EpochLog& row, std::span<const Matrix> reconstructed);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hypernews
