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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hetconv/hin.hpp"
#include "hetconv/matrix.hpp"

namespace hetconv {

// Mean attention distribution of every block in every transition. Vectors are
// ordered [Self, neighbor types in schema order]. A transition may omit
// blocks that no scored choice sequence visits.
struct AttentionSummary {
  Schema schema;
  std::vector<std::map<std::string, std::vector<double>>> transitions;

  std::size_t num_layers() const { return transitions.size() + 1; }
  // Throws ConfigError if the block is absent from that transition.
  const std::vector<double>& block(std::size_t transition, const std::string& type) const;
};

// attention[l][t] as produced by forward(): per transition, per schema type.
AttentionSummary summarize_attention(const Schema& schema,
                                     const std::vector<std::vector<Matrix>>& attention);

std::string attention_summary_to_json(const AttentionSummary& s);
// Accepts blocks whose "columns" list the neighbor types in any order; values
// are re-ordered to schema order.
AttentionSummary parse_attention_summary(const Schema& schema, const std::string& text);

// One selection in one block: Self (dummy self-relation) or a neighbor type.
struct Choice {
  std::size_t transition = 0;  // 0 is the 1-2 transition
  std::string block;
  std::optional<std::string> neighbor;  // nullopt == Self

  bool operator==(const Choice&) const = default;
  std::string label() const;  // e.g. "2-3 P:Self", "3-4 A<-P"
};

struct ChoiceSequence {
  std::string target;
  // choices[0] is the output transition, read backward towards the input.
  std::vector<Choice> choices;
  double score = 0.0;

  // Object types source -> target with dummy self-hops collapsed; a real
  // self-relation keeps its repeated type.
  std::vector<std::string> meta_path() const;
};

std::vector<ChoiceSequence> enumerate_choice_sequences(const Schema& schema,
                                                       const std::string& target,
                                                       int num_layers);

struct MetaPathScore {
  std::vector<std::string> meta_path;
  double score = 0.0;
  std::vector<ChoiceSequence> contributors;

  std::string name() const;
};

// Joins type names ("CPA"), with "-" separators if any name is longer than
// one character.
std::string meta_path_name(const std::vector<std::string>& types);

// Scores every choice sequence by the product of its chosen mean coefficients,
// merges sequences that share a meta-path and sorts by descending score, ties
// broken lexicographically on the type sequence.
std::vector<MetaPathScore> score_meta_paths(const AttentionSummary& summary,
                                            const std::string& target);
// Same, over an explicit list of sequences (any order).
std::vector<MetaPathScore> score_meta_paths(const AttentionSummary& summary,
                                            std::vector<ChoiceSequence> sequences);

struct PerObjectScores {
  std::string target;
  std::vector<std::vector<std::string>> meta_paths;
  Matrix scores;  // objects x meta_paths
  double dropped_mass = 0.0;
  std::vector<std::string> warnings;

  // (meta-path index, score) for one object, descending, ties lexicographic.
  std::vector<std::pair<std::size_t, double>> ranked(long object) const;
};

// Per-object meta-path importance by dynamic programming over the forward
// pass: relation hops multiply by the object's attention coefficient and the
// row-normalized link weight, Self hops by the Self coefficient. At most
// `max_prefixes` meta-path prefixes are tracked per block; lower-mass ones
// are dropped and reported in `warnings`.
PerObjectScores per_object_scores(const HinGraph& g,
                                  const std::vector<std::vector<Matrix>>& attention,
                                  const std::string& target,
                                  std::size_t max_prefixes = 256);

}  // namespace hetconv
