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

#include "hypernews/config.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace hypernews {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\"'");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\"'");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                    std::string(expected));
}

template <typename T>
T parse_number(std::string_view key, std::string_view raw, std::string_view expected) {
  const std::string s = trim(raw);
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, raw, expected);
  return out;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, raw, "a boolean (true/false)");
}

SplitRatios parse_ratios(std::string_view key, std::string_view raw) {
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  SplitRatios out{};
  std::size_t k = 0;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (k == 3) bad_value(key, raw, "three comma-separated ratios");
    out[k++] = parse_number<double>(key, part, "three comma-separated ratios");
  }
  if (k != 3) bad_value(key, raw, "three comma-separated ratios");
  return out;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

const ConfigKey* find_key(std::string_view name) {
  for (const ConfigKey& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"model.d_in", KeyKind::kInt, "input feature dimension"},
      {"model.d_h", KeyKind::kInt, "hidden dimension of every view"},
      {"model.layers_gnn", KeyKind::kInt, "propagation encoder layers"},
      {"model.layers_hgnn", KeyKind::kInt, "hypergraph encoder layers"},
      {"model.dropout", KeyKind::kReal, "dropout rate between layers"},
      {"model.p_thd", KeyKind::kReal, "fraction of nodes kept per learned hyperedge"},
      {"model.tau", KeyKind::kReal, "contrastive temperature"},
      {"model.lambda", KeyKind::kReal, "contrastive loss weight"},
      {"model.use_text", KeyKind::kBool, "enable the text view"},
      {"model.use_pro", KeyKind::kBool, "enable the propagation view"},
      {"model.use_hg", KeyKind::kBool, "enable the hypergraph view"},
      {"model.contrastive", KeyKind::kBool, "enable the contrastive loss"},
      {"model.dhsl", KeyKind::kBool, "enable hypergraph structure learning"},
      {"train.epochs", KeyKind::kInt, "training epochs per run"},
      {"train.batch_size", KeyKind::kInt, "news items per batch"},
      {"train.lr", KeyKind::kReal, "Adam learning rate"},
      {"train.beta1", KeyKind::kReal, "Adam first-moment decay"},
      {"train.beta2", KeyKind::kReal, "Adam second-moment decay"},
      {"train.eps", KeyKind::kReal, "Adam epsilon"},
      {"train.seed", KeyKind::kInt, "seed of the first run"},
      {"train.repeats", KeyKind::kInt, "independent runs (seed, seed+1, ...)"},
      {"train.ratios", KeyKind::kRatios, "train,val,test split ratios"},
  };
  return keys;
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown config key '" + std::string(key) + "'");
  auto as_int = [&] { return parse_number<long long>(key, value, "an integer"); };
  auto as_real = [&] { return parse_number<double>(key, value, "a number"); };
  auto as_bool = [&] { return parse_bool(key, value); };
  auto as_count = [&](long long lo) {
    const long long v = as_int();
    if (v < lo) bad_value(key, value, "an integer >= " + std::to_string(lo));
    return v;
  };

  if (key == "model.d_in") c.model.d_in = as_count(1);
  else if (key == "model.d_h") c.model.d_h = as_count(1);
  else if (key == "model.layers_gnn") c.model.layers_gnn = static_cast<int>(as_count(1));
  else if (key == "model.layers_hgnn") c.model.layers_hgnn = static_cast<int>(as_count(1));
  else if (key == "model.dropout") c.model.dropout = as_real();
  else if (key == "model.p_thd") c.model.p_thd = as_real();
  else if (key == "model.tau") c.model.tau = as_real();
  else if (key == "model.lambda") c.model.lambda = as_real();
  else if (key == "model.use_text") c.model.use_text = as_bool();
  else if (key == "model.use_pro") c.model.use_pro = as_bool();
  else if (key == "model.use_hg") c.model.use_hg = as_bool();
  else if (key == "model.contrastive") c.model.contrastive = as_bool();
  else if (key == "model.dhsl") c.model.dhsl = as_bool();
  else if (key == "train.epochs") c.epochs = static_cast<int>(as_count(1));
  else if (key == "train.batch_size") c.batch_size = static_cast<std::size_t>(as_count(1));
  else if (key == "train.lr") c.adam.lr = as_real();
  else if (key == "train.beta1") c.adam.beta1 = as_real();
  else if (key == "train.beta2") c.adam.beta2 = as_real();
  else if (key == "train.eps") c.adam.eps = as_real();
  else if (key == "train.seed") c.seed = static_cast<std::uint64_t>(as_count(0));
  else if (key == "train.repeats") c.repeats = static_cast<int>(as_count(1));
  else if (key == "train.ratios") c.ratios = parse_ratios(key, value);
}

std::string get_config_value(const TrainConfig& c, std::string_view key) {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown config key '" + std::string(key) + "'");
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };

  if (key == "model.d_in") return std::to_string(c.model.d_in);
  if (key == "model.d_h") return std::to_string(c.model.d_h);
  if (key == "model.layers_gnn") return std::to_string(c.model.layers_gnn);
  if (key == "model.layers_hgnn") return std::to_string(c.model.layers_hgnn);
  if (key == "model.dropout") return format_real(c.model.dropout);
  if (key == "model.p_thd") return format_real(c.model.p_thd);
  if (key == "model.tau") return format_real(c.model.tau);
  if (key == "model.lambda") return format_real(c.model.lambda);
  if (key == "model.use_text") return b(c.model.use_text);
  if (key == "model.use_pro") return b(c.model.use_pro);
  if (key == "model.use_hg") return b(c.model.use_hg);
  if (key == "model.contrastive") return b(c.model.contrastive);
  if (key == "model.dhsl") return b(c.model.dhsl);
  if (key == "train.epochs") return std::to_string(c.epochs);
  if (key == "train.batch_size") return std::to_string(c.batch_size);
  if (key == "train.lr") return format_real(c.adam.lr);
  if (key == "train.beta1") return format_real(c.adam.beta1);
  if (key == "train.beta2") return format_real(c.adam.beta2);
  if (key == "train.eps") return format_real(c.adam.eps);
  if (key == "train.seed") return std::to_string(c.seed);
  if (key == "train.repeats") return std::to_string(c.repeats);
  return format_real(c.ratios[0]) + "," + format_real(c.ratios[1]) + "," + format_real(c.ratios[2]);
}

}  // namespace hypernews
