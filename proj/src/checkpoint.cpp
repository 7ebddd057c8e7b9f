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

#include "hetconv/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "hetconv/error.hpp"
#include "hetconv/io.hpp"

namespace hetconv {

namespace fs = std::filesystem;
using nlohmann::json;

void save_checkpoint(const fs::path& dir, const ModelParams& params) {
  check_params(params);
  fs::create_directories(dir);
  auto names = params.tensor_names();
  auto tensors = params.tensors();
  for (std::size_t k = 0; k < names.size(); ++k) {
    write_file_atomic(dir / (names[k] + ".tsv"), dense_to_string(*tensors[k]));
  }
  json j;
  j["schema"] = json::parse(schema_to_json(params.schema));
  j["schema_hash"] = params.schema.hash_hex();
  j["dims"] = params.shape.dims;
  j["d_a"] = params.shape.d_a;
  j["mean_variant"] = params.shape.mean_variant;
  j["num_layers"] = params.shape.num_layers();
  j["params"] = names;
  write_file_atomic(dir / "model.json", j.dump(2) + "\n");
}

ModelParams load_checkpoint(const fs::path& dir) {
  json j;
  try {
    j = json::parse(read_file(dir / "model.json"));
  } catch (const json::exception& e) {
    throw DataError((dir / "model.json").string() + ": " + e.what());
  }
  ModelParams p;
  try {
    p.schema = parse_schema_json(j.at("schema").dump());
    if (p.schema.hash_hex() != j.at("schema_hash").get<std::string>()) {
      throw DataError((dir / "model.json").string() +
                      ": schema hash does not match its schema");
    }
    p.shape.dims = j.at("dims").get<std::vector<std::vector<long>>>();
    p.shape.d_a = j.at("d_a").get<long>();
    p.shape.mean_variant = j.at("mean_variant").get<bool>();
  } catch (const json::exception& e) {
    throw DataError((dir / "model.json").string() + ": " + e.what());
  }
  if (p.shape.num_layers() < 2) throw DataError("checkpoint needs at least 2 layers");
  const auto& types = p.schema.types();
  for (std::size_t l = 0; l + 1 < p.shape.num_layers(); ++l) {
    std::vector<BlockParams> layer(types.size());
    for (std::size_t t = 0; t < types.size(); ++t) {
      const std::string prefix = "L" + std::to_string(l + 2) + "_" + types[t] + "_";
      auto load = [&](const std::string& name) {
        return read_dense_file(dir / (prefix + name + ".tsv"));
      };
      layer[t].w_self = load("w_self");
      for (const auto& gamma : p.schema.neighbor_types(types[t])) {
        layer[t].w_rel.push_back(load("w_rel_" + gamma));
      }
      layer[t].w_q = load("w_q");
      layer[t].w_k = load("w_k");
      layer[t].w_a = load("w_a");
    }
    p.layers.push_back(std::move(layer));
  }
  check_params(p);
  return p;
}

}  // namespace hetconv
