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

#include "hetconv/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hetconv/error.hpp"

namespace hetconv {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dense_to_string(const Matrix& m) {
  std::ostringstream ss;
  write_dense(ss, m);
  return ss.str();
}

Schema parse_schema_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("schema.json: ") + e.what());
  }
  if (!j.contains("types") || !j.contains("relations")) {
    throw DataError("schema.json: needs 'types' and 'relations'");
  }
  std::vector<std::string> types;
  std::vector<Relation> rels;
  try {
    types = j.at("types").get<std::vector<std::string>>();
    for (const auto& r : j.at("relations")) {
      auto pair = r.get<std::vector<std::string>>();
      if (pair.size() != 2) throw DataError("schema.json: relation must be [src, dst]");
      rels.push_back({pair[0], pair[1]});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("schema.json: ") + e.what());
  }
  try {
    return Schema(std::move(types), std::move(rels));
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

std::string schema_to_json(const Schema& s) {
  json j;
  j["types"] = s.types();
  j["relations"] = json::array();
  for (const auto& r : s.relations()) j["relations"].push_back({r.src, r.dst});
  return j.dump(2) + "\n";
}

std::string split_to_json(const Split& s) {
  json j;
  j["train"] = s.train;
  j["val"] = s.val;
  j["test"] = s.test;
  return j.dump() + "\n";
}

Split parse_split_json(const std::string& text, const std::string& origin) {
  try {
    json j = json::parse(text);
    Split s;
    s.train = j.at("train").get<std::vector<long>>();
    s.val = j.at("val").get<std::vector<long>>();
    s.test = j.at("test").get<std::vector<long>>();
    return s;
  } catch (const json::exception& e) {
    throw DataError(origin + ": " + e.what());
  }
}

namespace {

std::vector<Triplet> read_edges(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Triplet> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long src = -1, dst = -1;
    double w = 1.0;
    if (!(ls >> src >> dst)) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected 'src dst [weight]'");
    }
    if (!(ls >> w)) w = 1.0;
    if (!std::isfinite(w) || w < 0.0) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": weight must be finite and non-negative");
    }
    if (w == 0.0) continue;
    // Stored as (row = dst, col = src).
    out.push_back({dst, src, w});
  }
  return out;
}

}  // namespace

HinGraph load_hin(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  HinGraph g;
  const std::string schema_text = read_file(dir / "schema.json");
  g.schema = parse_schema_json(schema_text);
  const auto& types = g.schema.types();
  for (const auto& t : types) {
    g.features.push_back(read_dense_file(dir / ("features_" + t + ".tsv")));
  }
  const auto& rels = g.schema.relations();
  g.adjacency.resize(rels.size());
  std::vector<bool> loaded(rels.size(), false);
  for (std::size_t r = 0; r < rels.size(); ++r) {
    fs::path p = dir / ("edges_" + rels[r].src + "_" + rels[r].dst + ".tsv");
    if (!fs::exists(p)) continue;
    long rows = g.features[g.schema.type_index(rels[r].dst)].rows();
    long cols = g.features[g.schema.type_index(rels[r].src)].rows();
    try {
      g.adjacency[r] = SparseAdj::from_triplets(rows, cols, read_edges(p));
    } catch (const DataError& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    loaded[r] = true;
  }
  for (std::size_t r = 0; r < rels.size(); ++r) {
    if (loaded[r]) continue;
    auto rev = g.schema.relation_index(rels[r].dst, rels[r].src);
    if (!rev || !loaded[*rev]) {
      throw DataError("missing edge file " +
                      (dir / ("edges_" + rels[r].src + "_" + rels[r].dst + ".tsv"))
                          .string());
    }
    g.adjacency[r] = g.adjacency[*rev].transpose();
  }

  json sj = json::parse(schema_text);
  for (const auto& t : types) {
    fs::path lp = dir / ("labels_" + t + ".tsv");
    if (!fs::exists(lp)) {
      if (sj.contains("classes") && sj["classes"].contains(t)) {
        throw DataError("missing label file " + lp.string());
      }
      continue;
    }
    std::vector<int> labels(g.features[g.schema.type_index(t)].rows(), -1);
    std::ifstream in(lp);
    std::string line;
    long lineno = 0;
    int max_class = -1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      long idx = -1;
      int cls = -1;
      if (!(ls >> idx >> cls) || idx < 0 || cls < 0) {
        throw DataError(lp.string() + ":" + std::to_string(lineno) +
                        ": expected 'object_index class_index'");
      }
      if (idx >= static_cast<long>(labels.size())) {
        throw DataError(lp.string() + ":" + std::to_string(lineno) +
                        ": object index " + std::to_string(idx) +
                        " out of range");
      }
      labels[idx] = cls;
      max_class = std::max(max_class, cls);
    }
    int classes = max_class + 1;
    if (sj.contains("classes") && sj["classes"].contains(t)) {
      classes = sj["classes"][t].get<int>();
    }
    g.labels[t] = std::move(labels);
    g.class_counts[t] = classes;

    fs::path sp = dir / ("split_" + t + ".json");
    if (fs::exists(sp)) g.splits[t] = parse_split_json(read_file(sp), sp.string());
  }
  return g;
}

void save_hin(const fs::path& dir, const HinGraph& g) {
  fs::create_directories(dir);
  json sj = json::parse(schema_to_json(g.schema));
  if (!g.class_counts.empty()) sj["classes"] = g.class_counts;
  write_file_atomic(dir / "schema.json", sj.dump(2) + "\n");
  const auto& types = g.schema.types();
  for (std::size_t t = 0; t < types.size(); ++t) {
    write_file_atomic(dir / ("features_" + types[t] + ".tsv"),
                      dense_to_string(g.features[t]));
  }
  const auto& rels = g.schema.relations();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    std::ostringstream ss;
    ss.precision(17);
    const auto& a = g.adjacency[r];
    for (long i = 0; i < a.rows(); ++i) {
      auto cols = a.row_cols(i);
      auto vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        ss << cols[k] << '\t' << i;
        if (vals[k] != 1.0) ss << '\t' << vals[k];
        ss << '\n';
      }
    }
    write_file_atomic(dir / ("edges_" + rels[r].src + "_" + rels[r].dst + ".tsv"),
                      ss.str());
  }
  for (const auto& [type, labels] : g.labels) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= 0) ss << i << '\t' << labels[i] << '\n';
    }
    write_file_atomic(dir / ("labels_" + type + ".tsv"), ss.str());
  }
  for (const auto& [type, split] : g.splits) {
    write_file_atomic(dir / ("split_" + type + ".json"), split_to_json(split));
  }
}

}  // namespace hetconv
