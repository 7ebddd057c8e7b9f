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

#include "hetconv/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "hetconv/error.hpp"

namespace hetconv {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(l2_weight >= 0.0)) fail("l2_weight must be non-negative");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0, 1)");
  if (max_epochs < 0) fail("max_epochs must be non-negative");
  if (patience < 0 || patience > max_epochs) fail("patience must be in [0, max_epochs]");
  if (num_layers < 2) fail("num_layers must be at least 2");
  if (d_a < 1) fail("d_a must be positive");
  if (!hidden_widths.empty() &&
      hidden_widths.size() != static_cast<std::size_t>(num_layers - 2)) {
    fail("hidden_widths needs num_layers - 2 = " + std::to_string(num_layers - 2) +
         " entries, got " + std::to_string(hidden_widths.size()));
  }
  for (const auto& [type, w] : type_weights) {
    if (!(w >= 0.0)) fail("type weight for '" + type + "' must be non-negative");
  }
}

std::vector<long> TrainConfig::resolved_hidden_widths() const {
  return hidden_widths.empty() ? default_hidden_widths(num_layers) : hidden_widths;
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads,
               AdamState& s, double lr, double l2) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (s.m.empty()) {
    for (const auto* p : params) {
      s.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      s.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (s.m.size() != params.size()) throw ShapeError("adam_step: state size mismatch");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    if (grads[k].rows() != p.rows() || grads[k].cols() != p.cols() ||
        s.m[k].rows() != p.rows() || s.m[k].cols() != p.cols()) {
      throw ShapeError("adam_step: shape mismatch for parameter " + std::to_string(k));
    }
    Matrix g = grads[k] + l2 * p;
    s.m[k] = s.beta1 * s.m[k] + (1.0 - s.beta1) * g;
    s.v[k] = s.beta2 * s.v[k] + (1.0 - s.beta2) * g.cwiseAbs2();
    p.array() -= lr * (s.m[k].array() / c1) / ((s.v[k].array() / c2).sqrt() + s.eps);
  }
}

std::map<std::string, LabeledRows> split_rows(const HinGraph& g,
                                              const std::string& split) {
  std::map<std::string, LabeledRows> out;
  for (const auto& [type, sp] : g.splits) {
    const std::vector<long>* idx = nullptr;
    if (split == "train") idx = &sp.train;
    else if (split == "val") idx = &sp.val;
    else if (split == "test") idx = &sp.test;
    else throw ConfigError("unknown split '" + split + "'");
    auto lab = g.labels.find(type);
    if (lab == g.labels.end()) throw DataError("split for unlabeled type " + type);
    LabeledRows rows;
    for (long i : *idx) {
      if (i < 0 || i >= static_cast<long>(lab->second.size()) || lab->second[i] < 0) {
        throw DataError("split " + split + " of " + type + " names unlabeled object " +
                        std::to_string(i));
      }
      rows.rows.push_back(i);
      rows.classes.push_back(lab->second[i]);
    }
    out[type] = std::move(rows);
  }
  return out;
}

Var cross_entropy_loss(std::span<const Var> final, const Schema& schema,
                       const std::map<std::string, LabeledRows>& labeled,
                       const std::map<std::string, double>& type_weights) {
  if (final.size() != schema.num_types()) {
    throw ShapeError("cross_entropy_loss: " + std::to_string(final.size()) +
                     " outputs for " + std::to_string(schema.num_types()) + " types");
  }
  Var total;
  for (const auto& [type, rows] : labeled) {
    if (rows.rows.empty()) continue;
    Var logits = final[schema.type_index(type)];
    Var term = softmax_cross_entropy(logits, rows.rows, rows.classes);
    auto w = type_weights.find(type);
    if (w != type_weights.end() && w->second != 1.0) term = scale(term, w->second);
    total = total.valid() ? add(total, term) : term;
  }
  if (!total.valid()) throw DataError("cross_entropy_loss: no labeled objects");
  return total;
}

Metrics classification_metrics(std::span<const int> predicted,
                               std::span<const int> truth, int num_classes) {
  if (predicted.size() != truth.size()) {
    throw ShapeError("classification_metrics: size mismatch");
  }
  if (truth.empty()) throw DataError("classification_metrics: empty split");
  std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i];
    const int t = truth[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      throw DataError("classification_metrics: class outside [0, " +
                      std::to_string(num_classes) + ")");
    }
    if (p == t) {
      ++tp[t];
      ++correct;
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  Metrics m;
  m.count = static_cast<long>(truth.size());
  long tp_sum = 0, fp_sum = 0, fn_sum = 0;
  double macro = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const long denom = 2 * tp[c] + fp[c] + fn[c];
    const double f1 = denom ? 2.0 * tp[c] / static_cast<double>(denom) : 0.0;
    m.per_class_f1.push_back(f1);
    macro += f1;
    tp_sum += tp[c];
    fp_sum += fp[c];
    fn_sum += fn[c];
  }
  m.macro_f1 = macro / num_classes;
  const long micro_denom = 2 * tp_sum + fp_sum + fn_sum;
  m.micro_f1 = micro_denom ? 2.0 * tp_sum / static_cast<double>(micro_denom) : 0.0;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return m;
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (long i = 0; i < logits.rows(); ++i) {
    Eigen::Index j = 0;
    logits.row(i).maxCoeff(&j);
    out[i] = static_cast<int>(j);
  }
  return out;
}

std::string epoch_log_json(const EpochLog& e) {
  nlohmann::json j;
  j["epoch"] = e.epoch;
  j["train_loss"] = e.train_loss;
  j["val_micro_f1"] = e.val_micro_f1;
  j["val_macro_f1"] = e.val_macro_f1;
  j["epoch_seconds"] = e.epoch_seconds;
  return j.dump();
}

ModelShape shape_for(const HinGraph& g, const TrainConfig& cfg) {
  std::vector<long> feature_dims;
  for (const auto& f : g.features) feature_dims.push_back(f.cols());
  std::map<std::string, int> outputs;
  int widest = 1;
  for (const auto& [type, count] : g.class_counts) {
    outputs[type] = count;
    widest = std::max(widest, count);
  }
  const auto hidden = cfg.resolved_hidden_widths();
  return make_shape(g.schema, feature_dims, hidden, outputs, widest, cfg.d_a,
                    cfg.mean_variant);
}

namespace {

std::map<std::string, Metrics> metrics_from_forward(
    const ForwardResult& fr, const HinGraph& g,
    const std::map<std::string, LabeledRows>& rows) {
  std::map<std::string, Metrics> out;
  for (const auto& [type, lr] : rows) {
    if (lr.rows.empty()) throw DataError("evaluate: empty split for " + type);
    const Matrix& logits = fr.final[g.schema.type_index(type)].value();
    std::vector<int> pred;
    for (long i : lr.rows) {
      Eigen::Index j = 0;
      logits.row(i).maxCoeff(&j);
      pred.push_back(static_cast<int>(j));
    }
    out[type] = classification_metrics(pred, lr.classes, g.class_counts.at(type));
  }
  return out;
}

std::vector<Matrix> collect_grads(const ForwardResult& fr, const ModelParams& p) {
  std::vector<Matrix> grads;
  auto vars = fr.bound.flat();
  auto tensors = p.tensors();
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Matrix& g = vars[k].grad();
    grads.push_back(g.size() ? g : Matrix::Zero(tensors[k]->rows(), tensors[k]->cols()));
  }
  return grads;
}

}  // namespace

double train_step(ModelParams& params, const PreparedGraph& pg,
                  const std::map<std::string, LabeledRows>& train,
                  const TrainConfig& cfg, AdamState& adam, Rng& rng) {
  Tape tape;
  ForwardResult fr = forward(params, pg, Mode::kTrain, cfg.dropout_rate, rng, tape);
  Var loss = cross_entropy_loss(fr.final, pg.graph->schema, train, cfg.type_weights);
  tape.backward(loss);
  auto grads = collect_grads(fr, params);
  auto tensors = params.tensors();
  adam_step(tensors, grads, adam, cfg.learning_rate, cfg.l2_weight);
  return loss.value()(0, 0);
}

FitResult fit(const HinGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  auto train = split_rows(g, "train");
  auto val = split_rows(g, "val");
  std::size_t n_train = 0;
  for (const auto& [t, r] : train) n_train += r.rows.size();
  if (n_train == 0) throw DataError("fit: no labeled training objects");
  bool have_val = false;
  for (const auto& [t, r] : val) have_val = have_val || !r.rows.empty();

  Rng root(cfg.seed);
  Rng init_rng = root.split(1);
  Rng dropout_root = root.split(2);

  FitResult res;
  res.params = init_params(g.schema, shape_for(g, cfg), init_rng);
  if (cfg.max_epochs == 0) return res;

  PreparedGraph pg(g);
  ModelParams current = res.params;
  AdamState adam;
  double best = -1.0;
  int since_best = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = dropout_root.split(static_cast<std::uint64_t>(epoch));
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = train_step(current, pg, train, cfg, adam, rng);

    if (have_val) {
      Tape tape;
      Rng unused(0);
      ForwardResult fr = forward(current, pg, Mode::kEval, 0.0, unused, tape);
      std::map<std::string, LabeledRows> nonempty;
      for (const auto& [t, r] : val) {
        if (!r.rows.empty()) nonempty[t] = r;
      }
      auto metrics = metrics_from_forward(fr, g, nonempty);
      for (const auto& [t, m] : metrics) {
        log.val_micro_f1 += m.micro_f1 / static_cast<double>(metrics.size());
        log.val_macro_f1 += m.macro_f1 / static_cast<double>(metrics.size());
      }
    }
    log.epoch_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start).count();
    res.log.push_back(log);

    if (log.val_micro_f1 > best) {
      best = log.val_micro_f1;
      res.params = current;
      res.best_epoch = epoch;
      res.best_val_micro_f1 = best;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return res;
}

std::map<std::string, Metrics> evaluate(const ModelParams& params,
                                        const HinGraph& g, const std::string& split) {
  auto rows = split_rows(g, split);
  if (rows.empty()) throw DataError("evaluate: graph has no split for any type");
  PreparedGraph pg(g);
  Tape tape;
  Rng unused(0);
  ForwardResult fr = forward(params, pg, Mode::kEval, 0.0, unused, tape);
  return metrics_from_forward(fr, g, rows);
}

GradcheckReport model_gradcheck(const HinGraph& g, const ModelShape& shape,
                                std::uint64_t seed, double h, double tol) {
  Rng rng(seed);
  ModelParams layout = init_params(g.schema, shape, rng);
  std::map<std::string, LabeledRows> targets;
  const auto& types = g.schema.types();
  for (std::size_t t = 0; t < types.size(); ++t) {
    LabeledRows rows;
    auto it = g.labels.find(types[t]);
    const long width = shape.dims.back()[t];
    for (long i = 0; i < g.features[t].rows(); ++i) {
      int c = static_cast<int>(i % width);
      if (!g.labels.empty()) {
        if (it == g.labels.end()) break;
        c = it->second[static_cast<std::size_t>(i)];
        if (c < 0 || c >= width) continue;
      }
      rows.rows.push_back(i);
      rows.classes.push_back(c);
    }
    if (!rows.rows.empty()) targets[types[t]] = std::move(rows);
  }
  PreparedGraph pg(g);
  ScalarFn f = [&](Tape& tape, std::span<const Var> vars) {
    Rng unused(0);
    ForwardResult fr = forward(layout, unflatten_params(layout, vars), pg, Mode::kEval, 0.0,
                               unused, tape);
    return cross_entropy_loss(fr.final, g.schema, targets);
  };
  std::vector<Matrix> values;
  for (const Matrix* m : layout.tensors()) values.push_back(*m);
  auto names = layout.tensor_names();
  return gradcheck(f, values, h, tol, names);
}

}  // namespace hetconv
