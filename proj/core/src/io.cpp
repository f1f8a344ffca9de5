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

#include "hypernews/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hypernews/config.hpp"

namespace hypernews {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json config_json(const TrainConfig& config) {
  Json out = Json::object();
  for (const ConfigKey& key : config_keys()) {
    const std::string text = get_config_value(config, key.name);
    switch (key.kind) {
      case KeyKind::kInt: out[key.name] = std::stoll(text); break;
      case KeyKind::kReal: out[key.name] = std::stod(text); break;
      case KeyKind::kBool: out[key.name] = text == "true"; break;
      case KeyKind::kRatios:
        out[key.name] = Json::array({config.ratios[0], config.ratios[1], config.ratios[2]});
        break;
    }
  }
  return out;
}

TrainConfig config_from_json(const Json& j) {
  TrainConfig config;
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_array()) {
      for (const Json& v : value) text += (text.empty() ? "" : ",") + v.dump();
    } else {
      text = value.dump();
    }
    set_config_value(config, key, text);
  }
  return config;
}

Json class_json(const ClassScores& s) {
  return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

Json metrics_object(const MetricsReport& m) {
  return Json{{"accuracy", m.accuracy},
              {"macro_f1", m.macro_f1},
              {"binary_f1", m.binary_f1},
              {"negative", class_json(m.negative)},
              {"positive", class_json(m.positive)},
              {"confusion",
               {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}, {"tn", m.confusion.tn}}}};
}

Json summary_json(const Summary& s) {
  return Json{{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
}

Json protocol_metrics(const ProtocolReport& report) {
  Json runs = Json::array();
  for (const RunResult& r : report.runs) runs.push_back(metrics_object(r.test));
  return Json{{"runs", std::move(runs)},
              {"accuracy", summary_json(report.accuracy)},
              {"macro_f1", summary_json(report.macro_f1)}};
}

Json protocol_detail(const ProtocolReport& report) {
  Json runs = Json::array();
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const RunResult& r = report.runs[i];
    runs.push_back(Json{{"run", i},
                        {"seed", r.seed},
                        {"split", {{"train", r.split.train.size()}, {"val", r.split.val.size()},
                                   {"test", r.split.test.size()}}},
                        {"best_epoch", r.training.best_epoch},
                        {"best_val_acc", r.training.best_val_acc},
                        {"test", metrics_object(r.test)}});
  }
  return Json{{"runs", std::move(runs)},
              {"accuracy", summary_json(report.accuracy)},
              {"macro_f1", summary_json(report.macro_f1)}};
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

void save_params(const std::filesystem::path& path, const ModelParams& params, const TrainConfig& config,
                 std::uint64_t seed) {
  Json list = Json::array();
  for (const Parameter* p : params.all()) {
    Json entry = matrix_json(p->value());
    entry["name"] = p->name();
    list.push_back(std::move(entry));
  }
  Json doc{{"config", config_json(config)}, {"seed", seed}, {"params", std::move(list)}};
  write_text(path, doc.dump(1) + "\n");
}

SavedModel load_params(const std::filesystem::path& path) {
  const Json doc = read_json(path);
  const std::string where = path.string() + ": ";
  try {
    TrainConfig config = config_from_json(doc.at("config"));
    const auto seed = doc.at("seed").get<std::uint64_t>();
    Rng rng(0);
    ModelParams params = ModelParams::init(config.model, rng);

    std::vector<Parameter*> slots = params.all();
    std::vector<bool> filled(slots.size(), false);
    for (const Json& entry : doc.at("params")) {
      const auto name = entry.at("name").get<std::string>();
      std::size_t k = 0;
      while (k < slots.size() && slots[k]->name() != name) ++k;
      if (k == slots.size()) throw DataError(where + "unknown parameter '" + name + "'");
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      const Json& data = entry.at("data");
      if (rows != slots[k]->rows() || cols != slots[k]->cols() ||
          data.size() != static_cast<std::size_t>(rows * cols)) {
        throw DataError(where + "parameter '" + name + "' has the wrong shape");
      }
      Matrix& m = slots[k]->value();
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i * cols + j)].get<double>();
      }
      filled[k] = true;
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (!filled[k]) throw DataError(where + "missing parameter '" + slots[k]->name() + "'");
    }
    return SavedModel{std::move(config), seed, std::move(params)};
  } catch (const Json::exception& e) {
    throw DataError(where + e.what());
  } catch (const ConfigError& e) {
    throw DataError(where + e.what());
  }
}

std::string epoch_log_json(const EpochLog& row) {
  return Json{{"run", row.run},       {"epoch", row.epoch},     {"train_loss", row.train_loss}, {"ce", row.ce},
              {"cl", row.cl},         {"val_acc", row.val_acc}, {"val_f1", row.val_f1}}
      .dump();
}

std::string metrics_json(const MetricsReport& m) { return metrics_object(m).dump(2) + "\n"; }

std::string protocol_metrics_json(const ProtocolReport& report) { return protocol_metrics(report).dump(2) + "\n"; }

std::string protocol_report_json(const ProtocolReport& report, const TrainConfig& config, std::string_view command,
                                 std::string_view variant) {
  Json doc{{"command", command}, {"variant", variant}, {"config", config_json(config)}};
  const Json detail = protocol_detail(report);
  for (const auto& [k, v] : detail.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

std::string sweep_metrics_json(std::span<const SweepRow> rows) {
  Json list = Json::array();
  for (const SweepRow& r : rows) list.push_back(Json{{"p_thd", r.p_thd}, {"metrics", protocol_metrics(r.report)}});
  return Json{{"rows", std::move(list)}}.dump(2) + "\n";
}

std::string sweep_report_json(std::span<const SweepRow> rows, const TrainConfig& config) {
  Json list = Json::array();
  for (const SweepRow& r : rows) list.push_back(Json{{"p_thd", r.p_thd}, {"report", protocol_detail(r.report)}});
  return Json{{"command", "sweep"}, {"config", config_json(config)}, {"rows", std::move(list)}}.dump(2) + "\n";
}

std::string structures_json(const EpochLog& row, std::span<const Matrix> reconstructed) {
  Json layers = Json::array();
  for (std::size_t l = 0; l < reconstructed.size(); ++l) {
    Json entry{{"layer", l + 1}};
    const Json m = matrix_json(reconstructed[l]);
    for (const auto& [k, v] : m.items()) entry[k] = v;
    layers.push_back(std::move(entry));
  }
  return Json{{"run", row.run}, {"epoch", row.epoch}, {"layers", std::move(layers)}}.dump();
}

}  // namespace hypernews
