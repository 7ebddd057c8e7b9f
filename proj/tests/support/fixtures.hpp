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
#include <string>
#include <vector>

#include "hetconv/hin.hpp"
#include "hetconv/interpret.hpp"
#include "hetconv/model.hpp"

namespace hetconv::testing {

// Six objects on the P/A/C/T schema: P0..P1, A0..A1, C0, T0, with feature
// widths 3, 2, 2, 3. A carries two classes and a split of one object each.
HinGraph toy_hin();

// DBLP-schema graph with at most `max_objects` objects, random weighted
// links (both directions, transposed) and random features of width 2 or 3.
// `connected` forces every object to have at least one neighbor of each
// neighbor type.
HinGraph random_tiny_hin(Rng& rng, long max_objects, bool connected = false);

// Plain dense evaluation of the model equations in eval mode, written
// without the tape: used as an oracle for forward().
struct DenseForward {
  std::vector<Matrix> final;
  std::vector<std::vector<Matrix>> attention;
};
DenseForward dense_forward(const ModelParams& params, const HinGraph& g);

// Enumerates every path instance ending at each target object, multiplying
// per-object attention coefficients and normalized link weights, and sums
// them per meta-path. Exponential; tiny graphs only.
std::map<std::vector<std::string>, std::vector<double>> brute_force_path_scores(
    const HinGraph& g, const std::vector<std::vector<Matrix>>& attention,
    const std::string& target);

// Number of length-`steps` walks from `target` in the reversed schema graph
// with a self-loop on every type, via powers of (I + M).
long walk_count(const Schema& s, const std::string& target, int steps);

// Mean attention coefficients printed for the 5-layer DBLP model.
AttentionSummary published_dblp_summary();

}  // namespace hetconv::testing
