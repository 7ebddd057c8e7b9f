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

#include "hetconv/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "hetconv/error.hpp"

namespace hetconv {

using nlohmann::json;

namespace {

std::string transition_label(std::size_t l) {
  return std::to_string(l + 1) + "-" + std::to_string(l + 2);
}

bool path_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

const std::vector<double>& AttentionSummary::block(std::size_t transition,
                                                   const std::string& type) const {
  if (transition >= transitions.size()) {
    throw ConfigError("attention summary has no transition " + transition_label(transition));
  }
  auto it = transitions[transition].find(type);
  if (it == transitions[transition].end()) {
    throw ConfigError("attention summary has no block " + type + " in transition " +
                      transition_label(transition));
  }
  return it->second;
}

AttentionSummary summarize_attention(const Schema& schema,
                                     const std::vector<std::vector<Matrix>>& attention) {
  AttentionSummary s;
  s.schema = schema;
  const auto& types = schema.types();
  for (const auto& layer : attention) {
    if (layer.size() != types.size()) {
      throw ShapeError("summarize_attention: " + std::to_string(layer.size()) +
                       " blocks for " + std::to_string(types.size()) + " types");
    }
    std::map<std::string, std::vector<double>> blocks;
    for (std::size_t t = 0; t < types.size(); ++t) {
      const Matrix& a = layer[t];
      std::vector<double> mean(a.cols(), 0.0);
      if (a.rows() > 0) {
        for (long j = 0; j < a.cols(); ++j) mean[j] = a.col(j).mean();
      }
      blocks[types[t]] = std::move(mean);
    }
    s.transitions.push_back(std::move(blocks));
  }
  return s;
}

std::string attention_summary_to_json(const AttentionSummary& s) {
  json j;
  j["num_layers"] = s.num_layers();
  j["transitions"] = json::array();
  for (std::size_t l = 0; l < s.transitions.size(); ++l) {
    json tj;
    tj["layers"] = transition_label(l);
    tj["blocks"] = json::array();
    for (const auto& type : s.schema.types()) {
      auto it = s.transitions[l].find(type);
      if (it == s.transitions[l].end()) continue;
      std::vector<std::string> cols = {"Self"};
      for (const auto& g : s.schema.neighbor_types(type)) cols.push_back(g);
      tj["blocks"].push_back({{"type", type}, {"columns", cols}, {"coefficients", it->second}});
    }
    j["transitions"].push_back(std::move(tj));
  }
  return j.dump(2) + "\n";
}

AttentionSummary parse_attention_summary(const Schema& schema, const std::string& text) {
  AttentionSummary s;
  s.schema = schema;
  try {
    json j = json::parse(text);
    for (const auto& tj : j.at("transitions")) {
      std::map<std::string, std::vector<double>> blocks;
      for (const auto& bj : tj.at("blocks")) {
        const auto type = bj.at("type").get<std::string>();
        const auto neigh = schema.neighbor_types(type);
        auto coeffs = bj.at("coefficients").get<std::vector<double>>();
        if (coeffs.size() != neigh.size() + 1) {
          throw DataError("attention summary: block " + type + " has " +
                          std::to_string(coeffs.size()) + " coefficients, expected " +
                          std::to_string(neigh.size() + 1));
        }
        std::vector<double> ordered(coeffs.size(), 0.0);
        if (bj.contains("columns")) {
          auto cols = bj.at("columns").get<std::vector<std::string>>();
          if (cols.size() != coeffs.size()) {
            throw DataError("attention summary: block " + type +
                            " columns/coefficients length mismatch");
          }
          std::vector<bool> filled(coeffs.size(), false);
          for (std::size_t c = 0; c < cols.size(); ++c) {
            std::size_t slot;
            if (cols[c] == "Self") {
              slot = 0;
            } else {
              auto it = std::find(neigh.begin(), neigh.end(), cols[c]);
              if (it == neigh.end()) {
                throw DataError("attention summary: '" + cols[c] +
                                "' is not a neighbor type of " + type);
              }
              slot = 1 + static_cast<std::size_t>(it - neigh.begin());
            }
            if (filled[slot]) {
              throw DataError("attention summary: duplicate column '" + cols[c] + "'");
            }
            filled[slot] = true;
            ordered[slot] = coeffs[c];
          }
        } else {
          ordered = coeffs;
        }
        blocks[type] = std::move(ordered);
      }
      s.transitions.push_back(std::move(blocks));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("attention summary: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("attention summary: ") + e.what());
  }
  return s;
}

std::string Choice::label() const {
  return transition_label(transition) + " " + block +
         (neighbor ? "<-" + *neighbor : std::string(":Self"));
}

std::vector<std::string> ChoiceSequence::meta_path() const {
  std::vector<std::string> backward = {target};
  for (const auto& c : choices) {
    if (c.neighbor) backward.push_back(*c.neighbor);
  }
  return {backward.rbegin(), backward.rend()};
}

std::vector<ChoiceSequence> enumerate_choice_sequences(const Schema& schema,
                                                       const std::string& target,
                                                       int num_layers) {
  schema.type_index(target);
  if (num_layers < 2) throw ConfigError("enumerate_choice_sequences: needs >= 2 layers");
  const std::size_t steps = static_cast<std::size_t>(num_layers - 1);
  std::vector<ChoiceSequence> out;
  std::vector<Choice> stack;
  // Walk from the output transition (index steps-1) down to transition 0.
  auto rec = [&](auto&& self, const std::string& block, std::size_t depth) -> void {
    if (depth == steps) {
      out.push_back({target, stack, 0.0});
      return;
    }
    const std::size_t transition = steps - 1 - depth;
    stack.push_back({transition, block, std::nullopt});
    self(self, block, depth + 1);
    stack.pop_back();
    for (const auto& gamma : schema.neighbor_types(block)) {
      stack.push_back({transition, block, gamma});
      self(self, gamma, depth + 1);
      stack.pop_back();
    }
  };
  rec(rec, target, 0);
  return out;
}

std::string meta_path_name(const std::vector<std::string>& types) {
  bool short_names = std::all_of(types.begin(), types.end(),
                                 [](const auto& t) { return t.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i && !short_names) out += "-";
    out += types[i];
  }
  return out;
}

std::string MetaPathScore::name() const { return meta_path_name(meta_path); }

std::vector<MetaPathScore> score_meta_paths(const AttentionSummary& summary,
                                            std::vector<ChoiceSequence> sequences) {
  std::map<std::vector<std::string>, MetaPathScore> merged;
  for (auto& seq : sequences) {
    double score = 1.0;
    for (const auto& c : seq.choices) {
      const auto& mean = summary.block(c.transition, c.block);
      std::size_t col = 0;
      if (c.neighbor) {
        const auto neigh = summary.schema.neighbor_types(c.block);
        auto it = std::find(neigh.begin(), neigh.end(), *c.neighbor);
        if (it == neigh.end()) {
          throw ConfigError("choice " + c.label() + " is not allowed by the schema");
        }
        col = 1 + static_cast<std::size_t>(it - neigh.begin());
      }
      if (col >= mean.size()) {
        throw ShapeError("attention summary block " + c.block + " is too short");
      }
      score *= mean[col];
    }
    seq.score = score;
    auto path = seq.meta_path();
    auto& entry = merged[path];
    entry.meta_path = path;
    entry.contributors.push_back(std::move(seq));
  }
  std::vector<MetaPathScore> out;
  for (auto& [path, entry] : merged) {
    // Contributors in descending score; summation in that fixed order keeps
    // the total independent of the input sequence order.
    std::stable_sort(entry.contributors.begin(), entry.contributors.end(),
                     [](const auto& a, const auto& b) {
                       if (a.score != b.score) return a.score > b.score;
                       return std::lexicographical_compare(
                           a.choices.begin(), a.choices.end(), b.choices.begin(),
                           b.choices.end(), [](const Choice& x, const Choice& y) {
                             return x.label() < y.label();
                           });
                     });
    entry.score = 0.0;
    for (const auto& c : entry.contributors) entry.score += c.score;
    out.push_back(std::move(entry));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return path_less(a.meta_path, b.meta_path);
  });
  return out;
}

std::vector<MetaPathScore> score_meta_paths(const AttentionSummary& summary,
                                            const std::string& target) {
  return score_meta_paths(
      summary, enumerate_choice_sequences(summary.schema, target,
                                          static_cast<int>(summary.num_layers())));
}

std::vector<std::pair<std::size_t, double>> PerObjectScores::ranked(long object) const {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t k = 0; k < meta_paths.size(); ++k) {
    out.push_back({k, scores(object, static_cast<long>(k))});
  }
  std::stable_sort(out.begin(), out.end(), [this](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return path_less(meta_paths[a.first], meta_paths[b.first]);
  });
  return out;
}

PerObjectScores per_object_scores(const HinGraph& g,
                                  const std::vector<std::vector<Matrix>>& attention,
                                  const std::string& target, std::size_t max_prefixes) {
  const Schema& schema = g.schema;
  const std::size_t target_idx = schema.type_index(target);
  const auto& types = schema.types();
  if (attention.empty()) throw ConfigError("per_object_scores: no attention records");
  if (max_prefixes == 0) throw ConfigError("per_object_scores: max_prefixes must be positive");
  auto normalized = normalized_adjacency(g);

  using PrefixMap = std::map<std::vector<std::string>, Vector>;
  std::vector<PrefixMap> state(types.size());
  for (std::size_t t = 0; t < types.size(); ++t) {
    state[t][{types[t]}] = Vector::Ones(g.features[t].rows());
  }

  PerObjectScores res;
  res.target = target;
  const std::size_t transitions = attention.size();
  for (std::size_t l = 0; l < transitions; ++l) {
    if (attention[l].size() != types.size()) {
      throw ShapeError("per_object_scores: transition " + transition_label(l) +
                       " has " + std::to_string(attention[l].size()) + " blocks");
    }
    std::vector<PrefixMap> next(types.size());
    for (std::size_t t = 0; t < types.size(); ++t) {
      if (l + 1 == transitions && t != target_idx) continue;
      const Matrix& a = attention[l][t];
      const auto rels = schema.incoming_relations(types[t]);
      const long n = g.features[t].rows();
      if (a.rows() != n || a.cols() != static_cast<long>(rels.size() + 1)) {
        throw ShapeError("per_object_scores: attention of block " + types[t] +
                         " is " + shape_str(a));
      }
      PrefixMap& out = next[t];
      for (const auto& [path, mass] : state[t]) {
        Vector v = a.col(0).cwiseProduct(mass);
        auto [it, inserted] = out.try_emplace(path, v);
        if (!inserted) it->second += v;
      }
      for (std::size_t k = 0; k < rels.size(); ++k) {
        const SparseAdj& adj = normalized[rels[k]];
        const std::size_t src = schema.type_index(schema.relations()[rels[k]].src);
        for (const auto& [path, mass] : state[src]) {
          Vector moved = Vector::Zero(n);
          for (long i = 0; i < n; ++i) {
            auto cols = adj.row_cols(i);
            auto vals = adj.row_values(i);
            double s = 0.0;
            for (std::size_t e = 0; e < cols.size(); ++e) s += vals[e] * mass[cols[e]];
            moved[i] = a(i, static_cast<long>(k + 1)) * s;
          }
          auto ext = path;
          ext.push_back(types[t]);
          auto [it, inserted] = out.try_emplace(std::move(ext), moved);
          if (!inserted) it->second += moved;
        }
      }
      if (out.size() > max_prefixes) {
        std::vector<std::pair<double, std::vector<std::string>>> by_mass;
        for (const auto& [path, mass] : out) by_mass.push_back({mass.sum(), path});
        std::stable_sort(by_mass.begin(), by_mass.end(), [](const auto& x, const auto& y) {
          if (x.first != y.first) return x.first > y.first;
          return path_less(x.second, y.second);
        });
        double dropped = 0.0;
        for (std::size_t r = max_prefixes; r < by_mass.size(); ++r) {
          dropped += by_mass[r].first;
          out.erase(by_mass[r].second);
        }
        if (t == target_idx) res.dropped_mass += dropped;
        res.warnings.push_back("transition " + transition_label(l) + " block " + types[t] +
                               ": dropped " + std::to_string(by_mass.size() - max_prefixes) +
                               " meta-path prefixes with total mass " +
                               std::to_string(dropped));
      }
    }
    state = std::move(next);
  }

  const PrefixMap& final_map = state[target_idx];
  const long n = g.features[target_idx].rows();
  res.scores = Matrix::Zero(n, static_cast<long>(final_map.size()));
  long k = 0;
  for (const auto& [path, mass] : final_map) {
    res.meta_paths.push_back(path);
    res.scores.col(k++) = mass;
  }
  return res;
}

}  // namespace hetconv
