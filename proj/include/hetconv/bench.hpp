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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hetconv/training.hpp"

namespace hetconv {

// Requested DBLP-like size: (authors, total objects, total links).
struct ScalePoint {
  long authors = 0;
  long objects = 0;
  long links = 0;
};

// The eight DBLP subgraph sizes used in the published scalability study.
std::vector<ScalePoint> dblp_scales();

struct ScaleResult {
  ScalePoint requested;
  long objects = 0;  // realized
  long links = 0;    // realized
  std::vector<double> samples;  // seconds per epoch, warmup excluded
  double median_seconds = 0.0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
  bool ok = true;
  std::string failure;

  long size() const { return objects + links; }
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct BenchReport {
  std::vector<ScaleResult> scales;
  int repeats = 0;
  int threads = 1;
  LinearFit fit;  // median seconds against objects + links
  // Largest t[i+1] / t[i] over consecutive scales.
  double max_consecutive_ratio = 0.0;
  // Largest (t_j / t_i)^(ln 2 / ln(s_j / s_i)) over scale pairs with
  // s_j / s_i >= 1.8: the epoch-time growth per doubling of objects + links.
  double max_doubling_ratio = 0.0;
  std::string note;
};

// Computes fit, ratios from the successful scales in `r.scales`.
void summarize(BenchReport& r);

using BenchProgress = std::function<void(const ScaleResult&)>;

// Generates each scale with a fixed seed and times one training epoch
// (forward, loss, backward, Adam update), median over `repeats` epochs after
// one warmup epoch. A scale that fails (e.g. out of memory) ends the sweep
// with a partial report.
BenchReport run_scaling(std::span<const ScalePoint> scales, const TrainConfig& cfg,
                        int repeats, std::uint64_t seed = 0,
                        const BenchProgress& progress = {});

std::string bench_report_json(const BenchReport& r);
std::string bench_report_table(const BenchReport& r);
std::string bench_report_csv(const BenchReport& r);

}  // namespace hetconv
