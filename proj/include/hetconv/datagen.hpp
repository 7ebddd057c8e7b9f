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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetconv/hin.hpp"

namespace hetconv {

enum class DegreeLaw { kPowerLaw, kUniform };

// Wiring of one relation pair. Every `dst` object draws a degree from the law
// and links to that many distinct `src` objects. Both directions declared in
// the schema are emitted, the second as the transpose of the first.
struct DegreeSpec {
  std::string src;
  std::string dst;
  DegreeLaw law = DegreeLaw::kPowerLaw;
  double exponent = 2.5;
  long min_degree = 1;
  long max_degree = 50;
  // When positive, sampled degrees are nudged until they sum to this value.
  long target_links = 0;
};

struct GenSpec {
  Schema schema = dblp_schema();
  std::map<std::string, long> counts = {{"P", 2500}, {"A", 1000}, {"C", 20}, {"T", 1500}};
  std::vector<DegreeSpec> degrees = {
      {"C", "P", DegreeLaw::kPowerLaw, 2.5, 1, 1, 0},
      {"P", "A", DegreeLaw::kPowerLaw, 2.5, 1, 50, 0},
      {"T", "P", DegreeLaw::kPowerLaw, 2.5, 1, 20, 0},
  };
  std::string labeled_type = "A";
  int num_classes = 4;
  // Source -> target; the first type carries the anchor classes and the last
  // must be labeled_type.
  std::vector<std::string> planted_path = {"C", "P", "A"};
  // Probability that a link along the planted path joins objects of the same
  // latent class.
  double affinity = 0.9;
  double noise = 0.05;
  long feature_dim = 128;
  // Adds a class-dependent offset to the labeled type's features.
  bool informative_features = false;
  std::uint64_t seed = 0;

  // Throws ConfigError on an inconsistent spec.
  void validate() const;
};

// Unknown keys are rejected. Missing keys keep the defaults above.
GenSpec parse_gen_spec(const std::string& json_text);
std::string gen_spec_to_json(const GenSpec& spec);

// Class of every planted-path target object: argmax over classes of the
// anchor-class mass reached through the row-normalized planted relations,
// ties to the lowest class. Objects reached by no anchor get -1.
std::vector<int> planted_vote(const HinGraph& g, const std::vector<std::string>& path,
                              const std::vector<int>& anchor_classes, int num_classes);

struct Generated {
  HinGraph graph;
  std::vector<int> anchor_classes;
  std::vector<int> clean_labels;  // labels before noise
};

Generated generate_full(const GenSpec& spec);
// Splits are left empty; see make_splits.
HinGraph generate(const GenSpec& spec);

// train_percent of the labeled objects for training, the rest halved into
// validation and test (test takes the odd one).
Split make_splits(const std::vector<int>& labels, double train_percent, std::uint64_t seed);
void assign_splits(HinGraph& g, double train_percent, std::uint64_t seed);

Matrix random_features(long n, long dim, std::uint64_t seed);

// A DBLP-like spec sized to (authors, total objects, total links): 20 venues,
// papers and terms in the real dataset's 14328:8898 ratio, one venue per
// paper, and the remaining links split 30:70 between author-paper and
// paper-term with power-law exponents fitted to the mean degrees.
GenSpec scale_spec(long authors, long total_objects, long total_links, std::uint64_t seed = 0);

// Mean of the discrete power law k^-exponent on [lo, hi].
double power_law_mean(double exponent, long lo, long hi);
// Exponent whose mean is closest to `mean` on [lo, hi], by bisection.
double fit_power_law_exponent(double mean, long lo, long hi);

}  // namespace hetconv
