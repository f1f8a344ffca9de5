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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "hypernews/config.hpp"
#include "hypernews/dataset.hpp"
#include "hypernews/harness.hpp"
#include "hypernews/io.hpp"
#include "hypernews/synthetic.hpp"

namespace hypernews::cli {

namespace fs = std::filesystem;

namespace {

/// Options shared by every subcommand.
struct Common {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::map<std::string, std::string> data;       // data.dir/news/trees/hyperedges
  std::map<std::string, std::string> overrides;  // dotted key -> flag value
};

const std::vector<std::string> kDataKeys{"data.dir", "data.news", "data.trees", "data.hyperedges"};

bool is_data_key(const std::string& key) {
  return std::find(kDataKeys.begin(), kDataKeys.end(), key) != kDataKeys.end();
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "config file ([section] and key = value lines)");
  sub->add_option_function<std::uint64_t>(
      "--seed", [&c](const std::uint64_t& s) { c.seed = s; }, "seed (same as train.seed)");
  sub->add_option("--out", c.out, "output directory (default: `out` from the config file, else ./out)");
}

void add_data_options(CLI::App* sub, Common& c) {
  sub->add_option_function<std::string>(
      "--data,--data.dir", [&c](const std::string& v) { c.data["data.dir"] = v; },
      "dataset directory holding news.jsonl, trees.jsonl, hyperedges.jsonl");
  for (const char* key : {"data.news", "data.trees", "data.hyperedges"}) {
    const std::string k = key;
    sub->add_option_function<std::string>(
        "--" + k, [&c, k](const std::string& v) { c.data[k] = v; }, "override the " + k.substr(5) + " file");
  }
}

void add_key_options(CLI::App* sub, Common& c) {
  const TrainConfig defaults;
  for (const ConfigKey& key : config_keys()) {
    const std::string name = key.name;
    sub->add_option_function<std::string>(
           "--" + name, [&c, name](const std::string& v) { c.overrides[name] = v; }, key.doc)
        ->default_str(get_config_value(defaults, name))
        ->type_name("VALUE");
  }
}

struct Resolved {
  TrainConfig config;
  bool d_in_set = false;
  std::map<std::string, std::string> data;
  std::string out;  // --out, else `out` from the config file; empty if neither
};

/// File values first, then flags; --seed wins over train.seed.
Resolved resolve(const Common& c, const TrainConfig& base = {}) {
  Resolved r{base, false, {}, {}};
  if (!c.config_file.empty()) {
    if (!fs::exists(c.config_file)) throw DataError("config file not found: " + c.config_file);
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_file(c.config_file);
    } catch (const CLI::Error& e) {
      throw ConfigError(c.config_file + ": " + e.what());
    }
    for (const CLI::ConfigItem& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      const std::string key = item.fullname();
      std::string value;
      for (const std::string& in : item.inputs) value += (value.empty() ? "" : ",") + in;
      if (is_data_key(key)) {
        r.data[key] = value;
      } else if (key == "out") {
        r.out = value;
      } else {
        set_config_value(r.config, key, value);
        if (key == "model.d_in") r.d_in_set = true;
      }
    }
  }
  for (const auto& [key, value] : c.overrides) {
    set_config_value(r.config, key, value);
    if (key == "model.d_in") r.d_in_set = true;
  }
  for (const auto& [key, value] : c.data) r.data[key] = value;
  if (c.seed) r.config.seed = *c.seed;
  if (!c.out.empty()) r.out = c.out;
  return r;
}

DatasetPaths data_paths(const Resolved& r) {
  auto get = [&](const std::string& k) -> std::string {
    auto it = r.data.find(k);
    return it == r.data.end() ? std::string() : it->second;
  };
  const std::string dir = get("data.dir");
  DatasetPaths p = DatasetPaths::in_directory(dir.empty() ? fs::path(".") : fs::path(dir));
  if (!get("data.news").empty()) p.news = get("data.news");
  if (!get("data.trees").empty()) p.trees = get("data.trees");
  if (!get("data.hyperedges").empty()) p.hyperedges = get("data.hyperedges");
  if (dir.empty() && get("data.news").empty()) throw ConfigError("no dataset given (use --data DIR)");
  return p;
}

/// Loads the dataset; d_in comes from the data unless the config sets it.
Dataset load(Resolved& r) {
  const DatasetPaths paths = data_paths(r);
  if (!r.d_in_set) r.config.model.d_in = detect_dimension(paths.news);
  return load_dataset(paths, r.config.model.d_in);
}

constexpr const char* kDefaultOut = "out";

/// Output directory for commands that always write; created on demand.
fs::path output_dir(const Resolved& r) {
  const fs::path dir = r.out.empty() ? fs::path(kDefaultOut) : fs::path(r.out);
  fs::create_directories(dir);
  return dir;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string pm(const Summary& s) { return fixed(s.mean) + " +- " + fixed(s.stddev); }

/// Streams run-log lines and, optionally, the H_re dump while training.
class Recorder {
 public:
  Recorder(const fs::path& out, bool dump_structures) : log_(out / "run_log.jsonl", std::ios::binary) {
    if (!log_) throw DataError("cannot write " + (out / "run_log.jsonl").string());
    if (dump_structures) {
      dump_.open(out / "structures.json", std::ios::binary);
      if (!dump_) throw DataError("cannot write " + (out / "structures.json").string());
      dump_ << "[";
    }
  }
  ~Recorder() {
    if (dump_.is_open()) dump_ << "\n]\n";
  }
  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  EpochObserver observer() {
    return [this](const EpochLog& row, std::span<const Matrix> h) {
      log_ << epoch_log_json(row) << '\n';
      if (dump_.is_open()) {
        dump_ << (first_ ? "\n" : ",\n") << structures_json(row, h);
        first_ = false;
      }
    };
  }

 private:
  std::ofstream log_;
  std::ofstream dump_;
  bool first_ = true;
};

void print_runs(std::ostream& out, const ProtocolReport& report) {
  out << std::setw(4) << "run" << std::setw(8) << "seed" << std::setw(12) << "best_epoch" << std::setw(10)
      << "val_acc" << std::setw(10) << "test_acc" << std::setw(10) << "macro_f1" << std::setw(11) << "binary_f1"
      << '\n';
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    const RunResult& r = report.runs[i];
    out << std::setw(4) << i << std::setw(8) << r.seed << std::setw(12) << r.training.best_epoch << std::setw(10)
        << fixed(r.training.best_val_acc) << std::setw(10) << fixed(r.test.accuracy) << std::setw(10)
        << fixed(r.test.macro_f1) << std::setw(11) << fixed(r.test.binary_f1) << '\n';
  }
  out << "accuracy " << pm(report.accuracy) << "   macro-F1 " << pm(report.macro_f1) << "   (" << report.runs.size()
      << " runs)\n";
}

void print_summary_header(std::ostream& out, const std::string& first) {
  out << std::left << std::setw(10) << first << std::right << std::setw(6) << "runs" << std::setw(20) << "accuracy"
      << std::setw(20) << "macro_f1" << '\n';
}

void print_summary_row(std::ostream& out, const std::string& first, const ProtocolReport& r) {
  out << std::left << std::setw(10) << first << std::right << std::setw(6) << r.runs.size() << std::setw(20)
      << pm(r.accuracy) << std::setw(20) << pm(r.macro_f1) << '\n';
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::size_t n = 200;
  double delta = 2.0;
  std::optional<Eigen::Index> d_in;
  std::size_t tree_min = 3;
  std::size_t tree_max = 12;
  std::size_t users = 100;
  double time_window = 1.0;
};

int run_synth(const Common& c, const SynthArgs& a, std::ostream& out) {
  Resolved r = resolve(c);
  SyntheticOptions opts;
  opts.n_news = a.n;
  opts.delta = a.delta;
  opts.d_in = a.d_in ? *a.d_in : r.config.model.d_in;
  opts.tree_min = a.tree_min;
  opts.tree_max = a.tree_max;
  opts.n_users = a.users;
  opts.time_window = a.time_window;
  opts.seed = r.config.seed;
  const fs::path dir = output_dir(r);
  SyntheticData s = generate_synthetic(opts);
  save_dataset(s.dataset, dir, s.interactions);
  out << "wrote " << s.dataset.news.size() << " news, " << s.dataset.hyperedges.size() << " hyperedges, "
      << s.interactions.size() << " interactions (d_in " << opts.d_in << ") to " << dir.string() << '\n';
  return kExitOk;
}

int run_train(const Common& c, bool dump, std::ostream& out) {
  Resolved r = resolve(c);
  const Dataset data = load(r);
  const fs::path dir = output_dir(r);
  r.config.validate();
  const ModelInputs inputs = ModelInputs::from(data);
  ProtocolReport report;
  {
    Recorder rec(dir, dump);
    report = run_protocol(r.config, inputs, rec.observer());
  }
  write_text(dir / "metrics.json", protocol_metrics_json(report));
  write_text(dir / "report.json", protocol_report_json(report, r.config, "train", "full"));
  save_params(dir / "params.json", report.runs.front().training.best_params, r.config, report.runs.front().seed);
  print_runs(out, report);
  return kExitOk;
}

int run_eval(const Common& c, const std::string& params_path, const std::string& which, std::ostream& out) {
  SavedModel saved = load_params(params_path);
  Resolved r = resolve(c, saved.config);
  if (!(r.config.model == saved.config.model)) {
    throw ConfigError("eval: model.* keys must match the saved model");
  }
  r.d_in_set = true;
  const Dataset data = load(r);
  const ModelInputs inputs = ModelInputs::from(data);
  const std::uint64_t seed = c.seed ? *c.seed : saved.seed;
  std::vector<Eigen::Index> indices;
  if (which == "all") {
    for (Eigen::Index i = 0; i < inputs.size(); ++i) indices.push_back(i);
  } else {
    Rng rng(seed);
    DatasetSplit split = split_dataset(inputs.labels, r.config.ratios, rng);
    indices = which == "train" ? split.train : which == "val" ? split.val : split.test;
  }
  const MetricsReport m = evaluate(saved.params, r.config.model, inputs, indices);
  if (!r.out.empty()) write_text(output_dir(r) / "metrics.json", metrics_json(m));
  out << which << " (" << indices.size() << " news, split seed " << seed << "): accuracy " << fixed(m.accuracy)
      << "  macro-F1 " << fixed(m.macro_f1) << "  binary-F1 " << fixed(m.binary_f1) << "  [tp " << m.confusion.tp
      << " fp " << m.confusion.fp << " fn " << m.confusion.fn << " tn " << m.confusion.tn << "]\n";
  return kExitOk;
}

int run_ablate(const Common& c, const std::vector<std::string>& names, bool dump, std::ostream& out) {
  std::vector<Variant> variants;
  for (const std::string& n : names) variants.push_back(parse_variant(n));
  if (variants.empty()) variants = all_variants();
  Resolved r = resolve(c);
  const Dataset data = load(r);
  const fs::path dir = output_dir(r);
  r.config.validate();
  const ModelInputs inputs = ModelInputs::from(data);

  std::vector<ProtocolReport> reports;
  {
    Recorder rec(dir, dump);
    for (Variant v : variants) reports.push_back(run_ablation(r.config, inputs, v, rec.observer()));
  }
  if (variants.size() == 1) {
    const TrainConfig applied = apply_variant(r.config, variants[0]);
    write_text(dir / "metrics.json", protocol_metrics_json(reports[0]));
    write_text(dir / "report.json",
               protocol_report_json(reports[0], applied, "ablate", std::string(variant_name(variants[0]))));
  } else {
    std::string metrics = "{\n";
    std::string report = "{\n";
    for (std::size_t i = 0; i < variants.size(); ++i) {
      const std::string name(variant_name(variants[i]));
      const std::string sep = i + 1 < variants.size() ? ",\n" : "\n";
      metrics += "\"" + name + "\": " + protocol_metrics_json(reports[i]);
      metrics.back() == '\n' ? metrics.pop_back() : void();
      metrics += sep;
      report += "\"" + name + "\": " +
                protocol_report_json(reports[i], apply_variant(r.config, variants[i]), "ablate", name);
      report.back() == '\n' ? report.pop_back() : void();
      report += sep;
    }
    write_text(dir / "metrics.json", metrics + "}\n");
    write_text(dir / "report.json", report + "}\n");
  }
  print_summary_header(out, "variant");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    print_summary_row(out, std::string(variant_name(variants[i])), reports[i]);
  }
  return kExitOk;
}

int run_sweep(const Common& c, const std::vector<double>& grid_in, bool dump, std::ostream& out) {
  std::vector<double> grid = grid_in.empty() ? default_pthd_grid() : grid_in;
  for (double p : grid) {
    if (p < 0.0 || p > 1.0) throw ConfigError("sweep: grid values must lie in [0, 1]");
  }
  Resolved r = resolve(c);
  const Dataset data = load(r);
  const fs::path dir = output_dir(r);
  r.config.validate();
  const ModelInputs inputs = ModelInputs::from(data);
  std::vector<SweepRow> rows;
  {
    Recorder rec(dir, dump);
    rows = sweep_pthd(r.config, inputs, grid, rec.observer());
  }
  write_text(dir / "metrics.json", sweep_metrics_json(rows));
  write_text(dir / "report.json", sweep_report_json(rows, r.config));
  print_summary_header(out, "p_thd");
  for (const SweepRow& row : rows) print_summary_row(out, fixed(row.p_thd, 1), row.report);
  return kExitOk;
}

int run_inspect(const Common& c, std::ostream& out) {
  Resolved r = resolve(c);
  const Dataset data = load(r);
  std::size_t fake = 0;
  for (const NewsRecord& n : data.news) fake += n.label == 1 ? 1 : 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  for (const PropagationTree& t : data.trees) {
    nodes += static_cast<std::size_t>(t.node_features.rows());
    edges += t.edges.size();
  }
  std::map<std::string, std::size_t> hist;
  for (const Hyperedge& h : data.hyperedges) ++hist[std::string(to_string(h.type))];

  const std::size_t n = data.news.size();
  std::ostringstream s;
  s << n << (n == 1 ? " graph, " : " graphs, ") << (n - fake) << " true, " << fake << " fake, " << nodes
    << (nodes == 1 ? " node, " : " nodes, ") << edges << (edges == 1 ? " edge" : " edges") << '\n';
  const std::size_t m = data.hyperedges.size();
  s << m << (m == 1 ? " hyperedge (" : " hyperedges (");
  bool first = true;
  for (const char* type : {"entity", "time", "user"}) {
    s << (first ? "" : ", ") << type << ": " << hist[type];
    first = false;
  }
  s << ")";
  s << ", d_in " << data.d_in << '\n';
  out << s.str();
  if (!r.out.empty()) write_text(output_dir(r) / "inspect.txt", s.str());
  return kExitOk;
}

}  // namespace

void configure_logging() {
  auto logger = std::make_shared<spdlog::logger>("hypernews", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("HYPERNEWS_LOG"); env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  spdlog::set_default_logger(std::move(logger));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hypernews fake news classifier", "hypernews"};
  app.require_subcommand(1);
  Common common;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth, common);
  SynthArgs sa;
  synth->add_option("--n", sa.n, "number of news items")->capture_default_str();
  synth->add_option("--delta", sa.delta, "distance between class means")->capture_default_str();
  synth->add_option_function<Eigen::Index>(
      "--d_in", [&sa](const Eigen::Index& d) { sa.d_in = d; }, "feature dimension (default: model.d_in)");
  synth->add_option("--tree_min", sa.tree_min, "smallest propagation tree")->capture_default_str();
  synth->add_option("--tree_max", sa.tree_max, "largest propagation tree")->capture_default_str();
  synth->add_option("--users", sa.users, "number of users")->capture_default_str();
  synth->add_option("--time_window", sa.time_window, "time hyperedge window")->capture_default_str();
  synth->add_option_function<Eigen::Index>(
      "--model.d_in", [&common](const Eigen::Index& d) { common.overrides["model.d_in"] = std::to_string(d); },
      "feature dimension");

  bool dump = false;
  CLI::App* train = app.add_subcommand("train", "train and test over repeated seeded splits");
  add_common(train, common);
  add_data_options(train, common);
  add_key_options(train, common);
  train->add_flag("--dump-structures", dump, "write per-epoch H_re to structures.json");

  CLI::App* eval = app.add_subcommand("eval", "score saved parameters");
  add_common(eval, common);
  add_data_options(eval, common);
  std::string params_path;
  std::string which = "test";
  eval->add_option("--params", params_path, "params.json written by train")->required();
  eval->add_option("--split", which, "which part of the seeded split to score")
      ->check(CLI::IsMember({"train", "val", "test", "all"}))
      ->capture_default_str();

  CLI::App* ablate = app.add_subcommand("ablate", "run ablation variants");
  add_common(ablate, common);
  add_data_options(ablate, common);
  add_key_options(ablate, common);
  std::vector<std::string> variant_names;
  ablate->add_option("--variant", variant_names,
                     "full | \"w/o Text\" | \"w/o Pro\" | \"w/o HG\" | \"w/o CL\" | \"w/o DHSL\" (default: all)");
  ablate->add_flag("--dump-structures", dump, "write per-epoch H_re to structures.json");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep model.p_thd");
  add_common(sweep, common);
  add_data_options(sweep, common);
  add_key_options(sweep, common);
  std::vector<double> grid;
  sweep->add_option("--grid", grid, "p_thd values (default: 0.0, 0.1, ..., 1.0)")->delimiter(',');
  sweep->add_flag("--dump-structures", dump, "write per-epoch H_re to structures.json");

  CLI::App* inspect = app.add_subcommand("inspect", "print dataset statistics");
  add_common(inspect, common);
  add_data_options(inspect, common);
  inspect->add_option_function<Eigen::Index>(
      "--model.d_in", [&common](const Eigen::Index& d) { common.overrides["model.d_in"] = std::to_string(d); },
      "feature dimension (default: from the data)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(common, sa, out);
    if (train->parsed()) return run_train(common, dump, out);
    if (eval->parsed()) return run_eval(common, params_path, which, out);
    if (ablate->parsed()) return run_ablate(common, variant_names, dump, out);
    if (sweep->parsed()) return run_sweep(common, grid, dump, out);
    if (inspect->parsed()) return run_inspect(common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace hypernews::cli
