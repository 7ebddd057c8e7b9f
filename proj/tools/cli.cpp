// Copyright 2026 The hetconv Authors.
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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetconv/bench.hpp"
#include "hetconv/checkpoint.hpp"
#include "hetconv/error.hpp"
#include "hetconv/interpret.hpp"
#include "hetconv/io.hpp"

namespace hetconv::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Exit status for a failed numerical check (no exception involved).
constexpr int kExitNumerical = 3;
constexpr int kExitData = 2;

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

json metrics_json(const Metrics& m) {
  return {{"micro_f1", m.micro_f1},
          {"macro_f1", m.macro_f1},
          {"accuracy", m.accuracy},
          {"per_class_f1", m.per_class_f1},
          {"count", m.count}};
}

json train_config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"l2_weight", c.l2_weight},
          {"dropout_rate", c.dropout_rate},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"num_layers", c.num_layers},
          {"hidden_widths", c.resolved_hidden_widths()},
          {"d_a", c.d_a},
          {"mean_variant", c.mean_variant},
          {"type_weights", c.type_weights}};
}

// Flag overrides shared by the commands that train or build a model.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> patience;
  std::optional<int> layers;
  std::optional<double> lr;
  std::optional<double> dropout;
  std::optional<double> train_percent;
  bool mean_variant = false;

  void attach(CLI::App* app, bool model_flags) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--train-percent", train_percent,
                    "Percent of labeled objects used for training when splits are generated");
    if (!model_flags) return;
    app->add_option("--epochs", epochs, "Maximum training epochs");
    app->add_option("--patience", patience, "Early-stopping patience in epochs");
    app->add_option("--layers", layers, "Number of layers including the input layer");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--dropout", dropout, "Dropout rate");
    app->add_flag("--mean-variant", mean_variant, "Replace attention by uniform weights");
  }

  RunConfig resolve(std::ostream& err) const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_run_config(read_file(config_path));
    if (seed) {
      cfg.train.seed = *seed;
      if (cfg.generator) cfg.generator->seed = *seed;
    }
    if (epochs) cfg.train.max_epochs = *epochs;
    if (patience) cfg.train.patience = *patience;
    if (layers) cfg.train.num_layers = *layers;
    if (lr) cfg.train.learning_rate = *lr;
    if (dropout) cfg.train.dropout_rate = *dropout;
    if (train_percent) cfg.train_percent = *train_percent;
    if (mean_variant) cfg.train.mean_variant = true;
    cfg.train.validate();
    if (!(cfg.train_percent > 0.0 && cfg.train_percent < 100.0)) {
      throw ConfigError("train_percent must be in (0, 100)");
    }
    err << "resolved config: " << json::parse(run_config_to_json(cfg)).dump() << "\n";
    return cfg;
  }
};

HinGraph load_valid(const fs::path& dir, std::ostream& err) {
  HinGraph g = load_hin(dir);
  auto violations = validate_graph(g);
  if (!violations.empty()) {
    for (const auto& v : violations) err << "violation: " << v << "\n";
    throw DataError(dir.string() + ": " + std::to_string(violations.size()) +
                    " validation violation(s)");
  }
  return g;
}

void check_compatible(const ModelParams& params, const HinGraph& g) {
  if (params.schema.hash() != g.schema.hash()) {
    throw DataError("schema hash mismatch: model " + params.schema.hash_hex() + ", data " +
                    g.schema.hash_hex());
  }
}

std::vector<std::vector<Matrix>> eval_attention(const ModelParams& params, const HinGraph& g) {
  PreparedGraph pg(g);
  Tape tape;
  Rng unused(0);
  return forward(params, pg, Mode::kEval, 0.0, unused, tape).attention;
}

ojson ranking_json(const std::vector<MetaPathScore>& scores, std::size_t top_k) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < scores.size() && i < top_k; ++i) {
    const auto& s = scores[i];
    ojson contrib = ojson::array();
    for (const auto& c : s.contributors) {
      std::vector<std::string> labels;
      for (const auto& ch : c.choices) labels.push_back(ch.label());
      contrib.push_back({{"choices", labels}, {"score", c.score}});
    }
    arr.push_back({{"meta_path", s.name()},
                   {"types", s.meta_path},
                   {"score", s.score},
                   {"contributors", contrib}});
  }
  return arr;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::vector<ScalePoint> parse_scales(const std::string& text) {
  std::vector<ScalePoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    ScalePoint p;
    char c1 = 0, c2 = 0;
    std::istringstream is(item);
    if (!(is >> p.authors >> c1 >> p.objects >> c2 >> p.links) || c1 != ':' || c2 != ':') {
      throw ConfigError("bad scale '" + item + "' (expected authors:objects:links)");
    }
    out.push_back(p);
  }
  return out;
}

void apply_thread_env() {
  const char* env = std::getenv("HETCONV_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw ConfigError(std::string("HETCONV_THREADS must be a positive integer, got '") + env +
                      "'");
  }
  set_num_threads(static_cast<int>(n));
}

struct Options {
  Overrides over;
  std::string data, out_dir, model, target, summary, out_file, tsv, split = "test", spec,
      scale, scales;
  bool per_object = false;
  std::size_t top_k = 0;
  std::size_t max_prefixes = 256;
  int repeats = 3;
  double h = 1e-5;
  double tol = 1e-4;
  long max_objects = 6;
  long max_features = 4;
};

GradcheckReport downscaled_gradcheck(const HinGraph& g, const Options& o, std::uint64_t seed) {
  HinGraph sub = induced_subgraph(g, o.max_objects, o.max_features);
  std::vector<long> feature_dims;
  for (const auto& f : sub.features) feature_dims.push_back(f.cols());
  const std::vector<long> hidden = {5};
  std::map<std::string, int> outputs;
  for (const auto& [t, k] : sub.class_counts) outputs[t] = k;
  ModelShape shape = make_shape(sub.schema, feature_dims, hidden, outputs, 3, 4, false);
  return model_gradcheck(sub, shape, seed, o.h, o.tol);
}

void print_gradcheck(const GradcheckReport& r, std::ostream& out) {
  for (const auto& e : r.params) {
    out << "  " << std::left << std::setw(24) << e.name << " max rel " << std::scientific
        << std::setprecision(3) << e.max_rel_error << "  max abs " << e.max_abs_error
        << std::defaultfloat << "\n";
  }
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = o.over.resolve(err);
  HinGraph g = load_valid(o.data, err);
  if (g.labels.empty()) {
    throw DataError("no label file (labels_<TYPE>.tsv) in " + o.data);
  }
  Rng split_root(cfg.train.seed);
  std::uint64_t stream = 0;
  for (const auto& [type, labels] : g.labels) {
    ++stream;
    if (g.splits.count(type)) continue;
    g.splits[type] = make_splits(labels, cfg.train_percent, split_root.split(stream).key());
    err << "no split file for " << type << ": drew a " << cfg.train_percent
        << "% training split\n";
  }
  FitResult fr = fit(g, cfg.train);

  const fs::path dir = o.out_dir;
  fs::create_directories(dir);
  save_checkpoint(dir / "model", fr.params);
  std::string log;
  for (const auto& e : fr.log) log += epoch_log_json(e) + "\n";
  write_file_atomic(dir / "log.jsonl", log);
  AttentionSummary summary = summarize_attention(g.schema, eval_attention(fr.params, g));
  write_file_atomic(dir / "attention_summary.json", attention_summary_to_json(summary));
  json metrics;
  metrics["best_epoch"] = fr.best_epoch;
  metrics["best_val_micro_f1"] = fr.best_val_micro_f1;
  metrics["test"] = json::object();
  bool have_test = false;
  for (const auto& [type, sp] : g.splits) have_test = have_test || !sp.test.empty();
  std::map<std::string, Metrics> test;
  if (have_test) {
    test = evaluate(fr.params, g, "test");
  } else {
    err << "test split is empty: test_metrics.json has no scores\n";
  }
  for (const auto& [type, m] : test) metrics["test"][type] = metrics_json(m);
  write_file_atomic(dir / "test_metrics.json", metrics.dump(2) + "\n");
  write_file_atomic(dir / "config.json", run_config_to_json(cfg));

  out << "trained " << fr.log.size() << " epochs, best epoch " << fr.best_epoch
      << ", val micro-F1 " << fr.best_val_micro_f1 << "\n";
  for (const auto& [type, m] : test) {
    out << "test " << type << ": micro-F1 " << m.micro_f1 << ", macro-F1 " << m.macro_f1
        << " (" << m.count << " objects)\n";
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  ModelParams params = load_checkpoint(o.model);
  HinGraph g = load_valid(o.data, err);
  check_compatible(params, g);
  json j = json::object();
  for (const auto& [type, m] : evaluate(params, g, o.split)) j[type] = metrics_json(m);
  emit(j.dump(2) + "\n", o.out_file, out);
  return 0;
}

int cmd_explain(const Options& o, std::ostream& out, std::ostream& err) {
  const std::size_t top_k = o.top_k == 0 ? static_cast<std::size_t>(-1) : o.top_k;
  Schema schema;
  std::optional<ModelParams> params;
  std::optional<HinGraph> graph;
  if (!o.model.empty()) {
    params = load_checkpoint(o.model);
    schema = params->schema;
  }
  if (!o.data.empty()) {
    if (o.summary.empty() || o.per_object) {
      graph = load_valid(o.data, err);
      if (params) check_compatible(*params, *graph);
      schema = graph->schema;
    } else {
      Schema s = parse_schema_json(read_file(fs::path(o.data) / "schema.json"));
      if (params && params->schema.hash() != s.hash()) {
        throw DataError("schema hash mismatch: model " + params->schema.hash_hex() +
                        ", data " + s.hash_hex());
      }
      schema = s;
    }
  }
  if (schema.num_types() == 0) throw ConfigError("explain needs --model or --data");
  schema.type_index(o.target);

  ojson report;
  report["target"] = o.target;
  report["schema_hash"] = schema.hash_hex();
  std::optional<std::vector<std::vector<Matrix>>> attention;
  AttentionSummary summary;
  if (!o.summary.empty()) {
    summary = parse_attention_summary(schema, read_file(o.summary));
  } else {
    if (!params || !graph) throw ConfigError("explain needs --model and --data (or --summary)");
    attention = eval_attention(*params, *graph);
    summary = summarize_attention(schema, *attention);
  }
  auto ranked = score_meta_paths(summary, o.target);
  report["global"] = ranking_json(ranked, top_k);
  if (o.per_object) {
    if (!params || !graph) throw ConfigError("--per-object needs --model and --data");
    if (!attention) attention = eval_attention(*params, *graph);
    PerObjectScores pos = per_object_scores(*graph, *attention, o.target, o.max_prefixes);
    for (const auto& w : pos.warnings) err << "warning: " << w << "\n";
    ojson objects = ojson::array();
    for (long i = 0; i < pos.scores.rows(); ++i) {
      ojson top = ojson::array();
      auto r = pos.ranked(i);
      for (std::size_t k = 0; k < r.size() && k < top_k; ++k) {
        top.push_back({{"meta_path", meta_path_name(pos.meta_paths[r[k].first])},
                       {"score", r[k].second}});
      }
      objects.push_back({{"object", i}, {"top", top}});
    }
    report["per_object"] = {{"dropped_mass", pos.dropped_mass},
                            {"warnings", pos.warnings},
                            {"objects", objects}};
  }
  if (!o.tsv.empty()) {
    std::ostringstream ts;
    ts << "meta_path\tscore\n";
    ts.precision(12);
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
      ts << ranked[i].name() << '\t' << ranked[i].score << '\n';
    }
    write_file_atomic(o.tsv, ts.str());
  }
  emit(report.dump(2) + "\n", o.out_file, out);
  if (!o.out_file.empty()) {
    for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
      out << ranked[i].name() << '\t' << ranked[i].score << '\n';
    }
  }
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = o.over.resolve(err);
  GenSpec spec = cfg.generator.value_or(GenSpec{});
  if (!o.spec.empty()) spec = parse_gen_spec(read_file(o.spec));
  if (o.over.seed) spec.seed = *o.over.seed;
  if (!o.scale.empty()) {
    auto pts = parse_scales(o.scale);
    if (pts.size() != 1) throw ConfigError("--scale takes one authors:objects:links triple");
    GenSpec scaled = scale_spec(pts[0].authors, pts[0].objects, pts[0].links, spec.seed);
    spec.counts = scaled.counts;
    spec.degrees = scaled.degrees;
  }
  HinGraph g = generate(spec);
  assign_splits(g, cfg.train_percent, spec.seed);
  save_hin(o.out_dir, g);
  write_file_atomic(fs::path(o.out_dir) / "gen_spec.json", gen_spec_to_json(spec));
  out << "generated " << g.total_objects() << " objects and " << g.total_links()
      << " links in " << o.out_dir << "\n";
  return 0;
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = o.over.resolve(err);
  auto scales = o.scales.empty() ? dblp_scales() : parse_scales(o.scales);
  BenchReport r = run_scaling(scales, cfg.train, o.repeats, cfg.train.seed,
                              [&](const ScaleResult& s) {
                                err << "scale " << s.requested.authors << ": "
                                    << (s.ok ? std::to_string(s.median_seconds) + " s"
                                             : "failed: " + s.failure)
                                    << "\n";
                              });
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_file_atomic(fs::path(o.out_dir) / "bench.json", bench_report_json(r));
    write_file_atomic(fs::path(o.out_dir) / "bench.txt", bench_report_table(r));
    write_file_atomic(fs::path(o.out_dir) / "bench.csv", bench_report_csv(r));
  }
  out << bench_report_table(r);
  return 0;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = o.over.resolve(err);
  HinGraph g = load_valid(o.data, err);
  GradcheckReport r = downscaled_gradcheck(g, o, cfg.train.seed);
  print_gradcheck(r, out);
  out << (r.passed ? "PASS" : "FAIL") << " gradcheck max relative error " << r.max_rel_error
      << " (tolerance " << r.tolerance << ")\n";
  return r.passed ? 0 : kExitNumerical;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = o.over.resolve(err);
  HinGraph g = load_hin(o.data);
  auto violations = validate_graph(g);
  out << (violations.empty() ? "PASS" : "FAIL") << " validate_graph: " << violations.size()
      << " violation(s)\n";
  for (const auto& v : violations) out << "  " << v << "\n";
  if (!violations.empty()) return kExitData;

  bool ok = true;
  Rng rng(cfg.train.seed);
  const auto& types = g.schema.types();
  for (std::size_t a = 0; a < types.size(); ++a) {
    for (std::size_t b = a + 1; b < types.size(); ++b) {
      if (!g.schema.relation_index(types[a], types[b]) ||
          !g.schema.relation_index(types[b], types[a])) {
        continue;
      }
      const long d = std::max(g.features[a].cols(), g.features[b].cols());
      Matrix theta0 = xavier_uniform(d, 8, rng);
      Matrix theta1 = xavier_uniform(d, 8, rng);
      double dev = spectral_equivalence_check(g, types[a], types[b], theta0, theta1);
      double scale = std::max({1.0, g.features[a].cwiseAbs().maxCoeff(),
                               g.features[b].cwiseAbs().maxCoeff()});
      bool pass = dev <= 1e-10 * scale;
      ok = ok && pass;
      out << (pass ? "PASS" : "FAIL") << " spectral " << types[a] << "<->" << types[b]
          << ": max deviation " << dev << "\n";
    }
  }
  GradcheckReport r = downscaled_gradcheck(g, o, cfg.train.seed);
  ok = ok && r.passed;
  out << (r.passed ? "PASS" : "FAIL") << " gradcheck (" << o.max_objects
      << " objects per type): max relative error " << r.max_rel_error << " (tolerance "
      << r.tolerance << ")\n";
  if (!r.passed) print_gradcheck(r, out);
  return ok ? 0 : kExitNumerical;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "learning_rate", "l2_weight", "dropout_rate", "max_epochs",   "patience",
      "seed",          "num_layers", "hidden_widths", "d_a",        "mean_variant",
      "type_weights",  "train_percent", "generator"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c;
  auto& t = c.train;
  if (j.contains("learning_rate")) t.learning_rate = get_as<double>(j, "learning_rate");
  if (j.contains("l2_weight")) t.l2_weight = get_as<double>(j, "l2_weight");
  if (j.contains("dropout_rate")) t.dropout_rate = get_as<double>(j, "dropout_rate");
  if (j.contains("max_epochs")) t.max_epochs = get_as<int>(j, "max_epochs");
  if (j.contains("patience")) t.patience = get_as<int>(j, "patience");
  if (j.contains("seed")) t.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("num_layers")) t.num_layers = get_as<int>(j, "num_layers");
  if (j.contains("hidden_widths")) t.hidden_widths = get_as<std::vector<long>>(j, "hidden_widths");
  if (j.contains("d_a")) t.d_a = get_as<long>(j, "d_a");
  if (j.contains("mean_variant")) t.mean_variant = get_as<bool>(j, "mean_variant");
  if (j.contains("type_weights")) {
    t.type_weights = get_as<std::map<std::string, double>>(j, "type_weights");
  }
  if (j.contains("train_percent")) c.train_percent = get_as<double>(j, "train_percent");
  if (j.contains("generator")) c.generator = parse_gen_spec(j.at("generator").dump());
  t.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j = train_config_json(cfg.train);
  j["train_percent"] = cfg.train_percent;
  if (cfg.generator) j["generator"] = json::parse(gen_spec_to_json(*cfg.generator));
  return j.dump(2) + "\n";
}

HinGraph induced_subgraph(const HinGraph& g, long max_per_type, long max_features) {
  const Schema& schema = g.schema;
  const auto& types = schema.types();
  const auto& rels = schema.relations();
  // Breadth-first from object 0 of the first type so the kept objects are
  // linked; types the search never reaches are filled in index order.
  std::vector<std::vector<long>> chosen(types.size());
  std::vector<std::map<long, long>> index(types.size());
  auto take = [&](std::size_t t, long i) {
    if (static_cast<long>(chosen[t].size()) >= std::min(max_per_type, g.features[t].rows()) ||
        index[t].count(i)) {
      return false;
    }
    index[t][i] = static_cast<long>(chosen[t].size());
    chosen[t].push_back(i);
    return true;
  };
  std::vector<std::pair<std::size_t, long>> queue;
  if (g.features[0].rows() > 0 && take(0, 0)) queue.push_back({0, 0});
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const auto [t, i] = queue[q];
    for (std::size_t r = 0; r < rels.size(); ++r) {
      if (rels[r].dst != types[t]) continue;
      const std::size_t src = schema.type_index(rels[r].src);
      for (long j : g.adjacency[r].row_cols(i)) {
        if (take(src, j)) queue.push_back({src, j});
      }
    }
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    for (long i = 0; i < g.features[t].rows(); ++i) take(t, i);
    std::sort(chosen[t].begin(), chosen[t].end());
    index[t].clear();
    for (std::size_t k = 0; k < chosen[t].size(); ++k) index[t][chosen[t][k]] = static_cast<long>(k);
  }

  HinGraph s;
  s.schema = schema;
  for (std::size_t t = 0; t < types.size(); ++t) {
    const long cols = std::min(max_features, g.features[t].cols());
    Matrix f(static_cast<long>(chosen[t].size()), cols);
    for (std::size_t k = 0; k < chosen[t].size(); ++k) {
      f.row(static_cast<long>(k)) = g.features[t].row(chosen[t][k]).head(cols);
    }
    s.features.push_back(std::move(f));
  }
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const std::size_t dst = schema.type_index(rels[r].dst);
    const std::size_t src = schema.type_index(rels[r].src);
    std::vector<Triplet> trip;
    const SparseAdj& a = g.adjacency[r];
    for (std::size_t k = 0; k < chosen[dst].size(); ++k) {
      auto c = a.row_cols(chosen[dst][k]);
      auto v = a.row_values(chosen[dst][k]);
      for (std::size_t e = 0; e < c.size(); ++e) {
        auto it = index[src].find(c[e]);
        if (it != index[src].end()) trip.push_back({static_cast<long>(k), it->second, v[e]});
      }
    }
    s.adjacency.push_back(SparseAdj::from_triplets(static_cast<long>(chosen[dst].size()),
                                                   static_cast<long>(chosen[src].size()),
                                                   std::move(trip)));
  }
  for (const auto& [type, labels] : g.labels) {
    const std::size_t t = schema.type_index(type);
    std::vector<int> sub;
    for (long i : chosen[t]) sub.push_back(labels[static_cast<std::size_t>(i)]);
    s.labels[type] = std::move(sub);
  }
  s.class_counts = g.class_counts;
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hetconv: heterogeneous graph convolution with type-level attention"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Train a model on a graph directory");
  train->add_option("--data", o.data, "Graph directory")->required();
  train->add_option("--out", o.out_dir, "Output directory")->required();
  o.over.attach(train, true);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a split");
  evaluate_cmd->add_option("--model", o.model, "Checkpoint directory")->required();
  evaluate_cmd->add_option("--data", o.data, "Graph directory")->required();
  evaluate_cmd->add_option("--split", o.split, "train, val or test");
  evaluate_cmd->add_option("--out", o.out_file, "Write the metrics JSON here");

  auto* explain = app.add_subcommand("explain", "Rank meta-paths by attention");
  explain->add_option("--model", o.model, "Checkpoint directory");
  explain->add_option("--data", o.data, "Graph directory");
  explain->add_option("--target", o.target, "Target object type")->required();
  explain->add_flag("--per-object", o.per_object, "Also rank meta-paths per object");
  explain->add_option("--top-k", o.top_k, "Keep the K best meta-paths (0 keeps all)");
  explain->add_option("--max-prefixes", o.max_prefixes,
                      "Meta-path prefixes tracked per block for --per-object");
  explain->add_option("--summary", o.summary,
                      "Attention summary JSON to score instead of running the model");
  explain->add_option("--out", o.out_file, "Write the report JSON here");
  explain->add_option("--tsv", o.tsv, "Also write the global ranking as TSV");

  auto* generate_cmd = app.add_subcommand("generate", "Generate a synthetic graph");
  generate_cmd->add_option("--out", o.out_dir, "Output directory")->required();
  generate_cmd->add_option("--spec", o.spec, "Generator spec JSON");
  generate_cmd->add_option("--scale", o.scale, "Size as authors:objects:links");
  o.over.attach(generate_cmd, false);

  auto* bench = app.add_subcommand("benchmark", "Time training epochs across graph scales");
  bench->add_option("--out", o.out_dir, "Report directory");
  bench->add_option("--repeats", o.repeats, "Timed epochs per scale");
  bench->add_option("--scales", o.scales, "authors:objects:links;... (default: DBLP sizes)");
  o.over.attach(bench, true);

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the model gradient");
  grad->add_option("--data", o.data, "Graph directory")->required();
  grad->add_option("--step", o.h, "Central-difference step");
  grad->add_option("--tol", o.tol, "Relative error tolerance");
  grad->add_option("--max-objects", o.max_objects, "Objects kept per type");
  grad->add_option("--max-features", o.max_features, "Feature columns kept");
  o.over.attach(grad, false);

  auto* verify = app.add_subcommand("verify", "Run data and numerical self-checks");
  verify->add_option("--data", o.data, "Graph directory")->required();
  verify->add_option("--max-objects", o.max_objects, "Objects kept per type for gradcheck");
  o.over.attach(verify, false);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_thread_env();
    if (train->parsed()) return cmd_train(o, out, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out, err);
    if (explain->parsed()) return cmd_explain(o, out, err);
    if (generate_cmd->parsed()) return cmd_generate(o, out, err);
    if (bench->parsed()) return cmd_benchmark(o, out, err);
    if (grad->parsed()) return cmd_gradcheck(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace hetconv::cli
