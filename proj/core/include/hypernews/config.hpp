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

#include <string>
#include <string_view>
#include <vector>

#include "hypernews/harness.hpp"

namespace hypernews {

enum class KeyKind { kInt, kReal, kBool, kRatios };

/// One dotted configuration key such as "model.p_thd".
struct ConfigKey {
  std::string name;
  KeyKind kind;
  std::string doc;
};

/// Every key a config file or command-line override may set, in display order.
const std::vector<ConfigKey>& config_keys();

/// Parses `value` and stores it under `key`. Throws ConfigError naming the key
/// when the key is unknown or the value does not parse.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Canonical text of the current value (round-trips through set_config_value).
std::string get_config_value(const TrainConfig& config, std::string_view key);

}  // namespace hypernews
