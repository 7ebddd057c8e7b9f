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
#include <span>
#include <string>
#include <vector>

#include "hetconv/gradcheck.hpp"
#include "hetconv/model.hpp"

namespace hetconv {

struct TrainConfig {
  double learning_rate = 0.01;
  double l2_weight = 5e-4;
  double dropout_rate = 0.5;
  int max_epochs = 300;
  int patience = 30;
  std::uint64_t seed = 0;
  int num_layers = 5;
  // Hidden widths for layers 2..N-1; empty selects default_hidden_widths.
  std::vector<long> hidden_widths;
  long d_a = 64;
  bool mean_variant = false;
  // Per-type loss weights; missing types weigh 1.
  std::map<std::string, double> type_weights;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  std::vector<long> resolved_hidden_widths() const;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

// Bias-corrected Adam. l2 adds l2 * theta to each gradient first. Moments are
// allocated on the first call.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads,
               AdamState& state, double lr, double l2 = 0.0);

struct LabeledRows {
  std::vector<long> rows;
  std::vector<int> classes;
};

// Labeled rows of each type restricted to one split ("train", "val", "test").
std::map<std::string, LabeledRows> split_rows(const HinGraph& g,
                                              const std::string& split);

// -sum_types w_type sum_rows ln softmax(final_type)[row, class]. final is in
// schema type order.
Var cross_entropy_loss(std::span<const Var> final, const Schema& schema,
                       const std::map<std::string, LabeledRows>& labeled,
                       const std::map<std::string, double>& type_weights = {});

struct Metrics {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<double> per_class_f1;
  long count = 0;
};

Metrics classification_metrics(std::span<const int> predicted,
                               std::span<const int> truth, int num_classes);

std::vector<int> argmax_rows(const Matrix& logits);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_micro_f1 = 0.0;
  double val_macro_f1 = 0.0;
  double epoch_seconds = 0.0;
};

std::string epoch_log_json(const EpochLog& e);

struct FitResult {
  ModelParams params;  // best-validation checkpoint
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_micro_f1 = 0.0;
};

// Output widths used by fit: class counts for labeled types, the largest
// class count elsewhere.
ModelShape shape_for(const HinGraph& g, const TrainConfig& cfg);

FitResult fit(const HinGraph& g, const TrainConfig& cfg);

// Eval-mode metrics per labeled type on the named split.
std::map<std::string, Metrics> evaluate(const ModelParams& params,
                                        const HinGraph& g, const std::string& split);

// Training timing helper: one forward(train) + loss + backward + Adam update.
// Returns the loss value.
double train_step(ModelParams& params, const PreparedGraph& pg,
                  const std::map<std::string, LabeledRows>& train,
                  const TrainConfig& cfg, AdamState& adam, Rng& rng);

// Central-difference check of the full model loss (eval mode, no dropout)
// over every parameter of a freshly initialized model. The loss covers the
// labeled objects; a graph without any labels uses object index modulo the
// output width as a stand-in target for every type.
GradcheckReport model_gradcheck(const HinGraph& g, const ModelShape& shape,
                                std::uint64_t seed, double h, double tol);

}  // namespace hetconv
