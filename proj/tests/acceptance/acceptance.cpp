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

// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "hetconv/bench.hpp"
#include "hetconv/checkpoint.hpp"
#include "hetconv/datagen.hpp"
#include "hetconv/interpret.hpp"
#include "hetconv/io.hpp"
#include "hetconv/training.hpp"

namespace hetconv {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Matrix random_matrix(long r, long c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

const MetaPathScore* find_path(const std::vector<MetaPathScore>& s,
                               const std::vector<std::string>& p) {
  for (const auto& m : s) {
    if (m.meta_path == p) return &m;
  }
  return nullptr;
}

Outcome published_scores_golden() {
  AttentionSummary summary = testing::published_dblp_summary();
  auto scores = score_meta_paths(summary, "A");
  Outcome o;
  double worst = 0.0;
  const MetaPathScore* cpa = find_path(scores, {"C", "P", "A"});
  if (cpa == nullptr || cpa->contributors.size() != 6) {
    return {false, "CPA missing or without six contributors"};
  }
  // Printed contributor products, any order.
  std::vector<double> printed = {0.0748, 0.0242, 0.0332, 0.0373, 0.1151, 0.1382};
  std::vector<double> got;
  for (const auto& c : cpa->contributors) got.push_back(c.score);
  std::sort(printed.begin(), printed.end());
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::abs(printed[i] - got[i]));
  const std::vector<std::pair<std::vector<std::string>, double>> singles = {
      {{"C", "P", "T", "P", "A"}, 0.1098},
      {{"C", "P", "A", "P", "A"}, 0.0935},
      {{"C", "P", "C", "P", "A"}, 0.0736}};
  for (const auto& [p, v] : singles) {
    const MetaPathScore* m = find_path(scores, p);
    if (m == nullptr) return {false, meta_path_name(p) + " missing"};
    worst = std::max(worst, std::abs(m->score - v));
  }
  const double total_dev = std::abs(cpa->score - 0.4228);
  o.pass = worst <= 1e-4 && total_dev <= 1e-4;
  o.detail = "CPA total " + fmt("%.5f", cpa->score) + ", max product deviation " +
             fmt("%.2e", worst);
  return o;
}

Outcome spectral_equivalence() {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const long n_o = 5 + static_cast<long>(rng.uniform_int(46));
    const long n_g = 5 + static_cast<long>(rng.uniform_int(46));
    const long d_o = 2 + static_cast<long>(rng.uniform_int(6));
    long d_g = 2 + static_cast<long>(rng.uniform_int(6));
    if (d_g == d_o) ++d_g;
    std::vector<Triplet> trip;
    for (long i = 0; i < n_o; ++i) {
      for (long j = 0; j < n_g; ++j) {
        if (rng.bernoulli(0.15)) trip.push_back({i, j, rng.uniform(0.5, 3.0)});
      }
    }
    SparseAdj a = SparseAdj::from_triplets(n_o, n_g, trip);
    const long d = std::max(d_o, d_g);
    const long d_out = 1 + static_cast<long>(rng.uniform_int(5));
    worst = std::max(worst, spectral_equivalence_check(
                                random_matrix(n_o, d_o, rng), random_matrix(n_g, d_g, rng),
                                random_matrix(d, d_out, rng), random_matrix(d, d_out, rng), a,
                                a.transpose()));
  }
  return {worst <= 1e-10, "max deviation " + fmt("%.2e", worst) + " over 20 instances"};
}

Outcome gradient_check() {
  HinGraph g = testing::toy_hin();
  TrainConfig cfg;
  cfg.num_layers = 3;
  GradcheckReport r = model_gradcheck(g, shape_for(g, cfg), 1, 1e-5, 1e-4);
  std::string worst_name;
  double worst = -1.0;
  for (const auto& e : r.params) {
    if (e.max_rel_error > worst) {
      worst = e.max_rel_error;
      worst_name = e.name;
    }
  }
  return {r.passed && r.max_rel_error < 1e-4,
          "max relative error " + fmt("%.2e", r.max_rel_error) + " (" + worst_name + ", " +
              std::to_string(r.params.size()) + " tensors, " +
              std::to_string(g.total_objects()) + " objects)"};
}

Outcome probability_invariants() {
  Rng rng(7);
  double att_dev = 0.0, path_dev = 0.0, adj_dev = 0.0;
  for (int pass = 0; pass < 100; ++pass) {
    HinGraph g = testing::random_tiny_hin(rng, 12, pass % 2 == 0);
    std::vector<long> dims;
    for (const auto& f : g.features) dims.push_back(f.cols());
    const int layers = 2 + static_cast<int>(rng.uniform_int(3));
    std::vector<long> hidden(static_cast<std::size_t>(layers - 2), 4);
    ModelShape shape = make_shape(g.schema, dims, hidden, {}, 3, 3, false);
    Rng init = rng.split(static_cast<std::uint64_t>(pass));
    ModelParams p = init_params(g.schema, shape, init);
    PreparedGraph pg(g);
    Tape tape;
    ForwardResult fr = forward(p, pg, Mode::kTrain, 0.5, init, tape);
    for (const auto& layer : fr.attention) {
      for (const auto& a : layer) {
        for (long i = 0; i < a.rows(); ++i) att_dev = std::max(att_dev, std::abs(a.row(i).sum() - 1.0));
      }
    }
    AttentionSummary s = summarize_attention(g.schema, fr.attention);
    for (const auto& t : g.schema.types()) {
      double total = 0.0;
      for (const auto& m : score_meta_paths(s, t)) total += m.score;
      path_dev = std::max(path_dev, std::abs(total - 1.0));
    }
    for (const auto& a : pg.normalized) {
      for (long i = 0; i < a.rows(); ++i) {
        if (!a.row_cols(i).empty()) adj_dev = std::max(adj_dev, std::abs(a.row_sum(i) - 1.0));
      }
    }
  }
  return {att_dev <= 1e-6 && path_dev <= 1e-9 && adj_dev <= 1e-9,
          "attention rows " + fmt("%.1e", att_dev) + ", meta-path totals " +
              fmt("%.1e", path_dev) + ", adjacency rows " + fmt("%.1e", adj_dev)};
}

Outcome theorem1_oracle() {
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    HinGraph g = testing::random_tiny_hin(rng, 12, trial % 3 != 0);
    std::vector<long> dims;
    for (const auto& f : g.features) dims.push_back(f.cols());
    ModelShape shape = make_shape(g.schema, dims, std::vector<long>{4}, {}, 3, 3, false);
    Rng init = rng.split(static_cast<std::uint64_t>(trial));
    ModelParams p = init_params(g.schema, shape, init);
    for (auto& layer : p.layers) {
      for (auto& b : layer) b.w_a *= 6.0;
    }
    PreparedGraph pg(g);
    Tape tape;
    ForwardResult fr = forward(p, pg, Mode::kEval, 0.0, init, tape);
    for (const auto& target : g.schema.types()) {
      PerObjectScores got = per_object_scores(g, fr.attention, target);
      auto want = testing::brute_force_path_scores(g, fr.attention, target);
      std::map<std::vector<std::string>, long> col;
      for (std::size_t k = 0; k < got.meta_paths.size(); ++k) col[got.meta_paths[k]] = static_cast<long>(k);
      for (const auto& [path, v] : want) {
        auto it = col.find(path);
        for (long o = 0; o < got.scores.rows(); ++o) {
          const double mine = it == col.end() ? 0.0 : got.scores(o, it->second);
          worst = std::max(worst, std::abs(mine - v[static_cast<std::size_t>(o)]));
        }
      }
      for (const auto& [path, k] : col) {
        if (want.count(path)) continue;
        worst = std::max(worst, got.scores.col(k).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst <= 1e-9, "max deviation " + fmt("%.2e", worst) + " over 10 graphs, all targets"};
}

HinGraph planted_graph(std::uint64_t seed, double train_percent) {
  GenSpec spec;  // 4 classes, noise 0.05, C->P->A, about 5k objects
  spec.seed = seed;
  HinGraph g = generate(spec);
  assign_splits(g, train_percent, seed);
  return g;
}

Outcome planted_recovery() {
  const fs::path dir = fs::temp_directory_path() / "hetconv_acceptance_planted";
  int f1_ok = 0, top_ok = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    fs::remove_all(dir);
    HinGraph g = planted_graph(seed, 80.0);
    TrainConfig cfg;
    cfg.num_layers = 4;
    cfg.seed = seed;
    FitResult fr = fit(g, cfg);
    const double f1 = evaluate(fr.params, g, "test").at("A").micro_f1;
    save_hin(dir / "data", g);
    save_checkpoint(dir / "model", fr.params);
    std::ostringstream out, err;
    const int code = cli::run({"explain", "--model", (dir / "model").string(), "--data",
                               (dir / "data").string(), "--target", "A", "--top-k", "1"},
                              out, err);
    std::string top = "?";
    if (code == 0) {
      auto j = nlohmann::json::parse(out.str());
      top = j.at("global").at(0).at("meta_path").get<std::string>();
    }
    f1_ok += f1 >= 0.90;
    top_ok += top == "CPA";
    per_seed << (seed > 1 ? " " : "") << fmt("%.3f", f1) << "/" << top;
  }
  fs::remove_all(dir);
  return {f1_ok >= 8 && top_ok >= 8,
          std::to_string(f1_ok) + "/10 seeds micro-F1 >= 0.90, " + std::to_string(top_ok) +
              "/10 CPA top-1 [" + per_seed.str() + "]"};
}

Outcome depth_effect() {
  double sum2 = 0.0, sum3 = 0.0;
  std::ostringstream per_seed;
  const int seeds = 3;
  for (int seed = 1; seed <= seeds; ++seed) {
    HinGraph g = planted_graph(100 + static_cast<std::uint64_t>(seed), 80.0);
    double f[2];
    for (int layers : {2, 3}) {
      TrainConfig cfg;
      cfg.num_layers = layers;
      cfg.seed = static_cast<std::uint64_t>(seed);
      FitResult fr = fit(g, cfg);
      f[layers - 2] = evaluate(fr.params, g, "test").at("A").micro_f1;
    }
    sum2 += f[0];
    sum3 += f[1];
    per_seed << (seed > 1 ? " " : "") << fmt("%.3f", f[0]) << "<" << fmt("%.3f", f[1]);
  }
  const double gap = (sum3 - sum2) / seeds * 100.0;
  return {gap >= 20.0, "mean 2-layer " + fmt("%.3f", sum2 / seeds) + " vs 3-layer " +
                           fmt("%.3f", sum3 / seeds) + ", gap " + fmt("%.1f", gap) +
                           " points [" + per_seed.str() + "]"};
}

Outcome quasi_linear_scaling() {
  std::vector<ScalePoint> scales = {{400, 4200, 15800}};
  for (const auto& s : dblp_scales()) scales.push_back(s);
  TrainConfig cfg;  // 5 layers with the default widths
  BenchReport r = run_scaling(scales, cfg, 3, 0);
  if (!r.note.empty()) return {false, r.note};
  const double span = static_cast<double>(r.scales.back().size()) /
                      static_cast<double>(r.scales.front().size());
  std::ostringstream times;
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    times << (i ? " " : "") << fmt("%.3f", r.scales[i].median_seconds);
  }
  return {r.scales.size() >= 6 && span >= 10.0 && r.fit.r2 >= 0.98 && r.max_doubling_ratio <= 2.5,
          std::to_string(r.scales.size()) + " scales spanning " + fmt("%.1fx", span) + ", R^2 " +
              fmt("%.4f", r.fit.r2) + ", doubling ratio " + fmt("%.3f", r.max_doubling_ratio) +
              " (max consecutive " + fmt("%.3f", r.max_consecutive_ratio) + "), seconds [" +
              times.str() + "]"};
}

Outcome mean_variant_ablation() {
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Tape t;
    const long n = 2 + static_cast<long>(rng.uniform_int(8));
    const long d = 2 + static_cast<long>(rng.uniform_int(5));
    const long d_a = 1 + static_cast<long>(rng.uniform_int(4));
    const std::size_t k = rng.uniform_int(4);
    BlockVars b;
    b.w_q = t.constant(random_matrix(d, d_a, rng));
    b.w_k = t.constant(random_matrix(d, d_a, rng));
    b.w_a = t.constant(random_matrix(2 * d_a, 1, rng));
    Convolved z{t.constant(random_matrix(n, d, rng, -2, 2)), {}};
    for (std::size_t j = 0; j < k; ++j) z.z_rel.push_back(t.constant(random_matrix(n, d, rng, -2, 2)));
    Matrix mean = type_attention(b, z, true).h_new.value();
    b.w_a = t.constant(Matrix::Zero(2 * d_a, 1));
    Matrix frozen = type_attention(b, z, false).h_new.value();
    worst = std::max(worst, (mean - frozen).cwiseAbs().maxCoeff());
  }
  // Whole-model check: mean-variant flag against the same weights with w_a = 0.
  for (int trial = 0; trial < 5; ++trial) {
    HinGraph g = testing::random_tiny_hin(rng, 12, true);
    std::vector<long> dims;
    for (const auto& f : g.features) dims.push_back(f.cols());
    ModelShape shape = make_shape(g.schema, dims, std::vector<long>{4, 3}, {}, 2, 3, true);
    Rng init = rng.split(static_cast<std::uint64_t>(trial));
    ModelParams mean = init_params(g.schema, shape, init);
    ModelParams frozen = mean;
    frozen.shape.mean_variant = false;
    for (auto& layer : frozen.layers) {
      for (auto& b : layer) b.w_a.setZero();
    }
    PreparedGraph pg(g);
    Tape t1, t2;
    ForwardResult a = forward(mean, pg, Mode::kEval, 0.0, init, t1);
    ForwardResult c = forward(frozen, pg, Mode::kEval, 0.0, init, t2);
    for (std::size_t i = 0; i < a.final.size(); ++i) {
      worst = std::max(worst, (a.final[i].value() - c.final[i].value()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, "max deviation " + fmt("%.2e", worst) + " (20 blocks, 5 models)"};
}

}  // namespace
}  // namespace hetconv

int main(int argc, char** argv) {
  using namespace hetconv;
  std::vector<Criterion> all = {
      {1, "published DBLP meta-path scores", 1.0, published_scores_golden},
      {2, "spectral equivalence", 5.0, spectral_equivalence},
      {3, "gradient correctness", 30.0, gradient_check},
      {4, "probability invariants", 60.0, probability_invariants},
      {5, "per-object scores vs path-instance oracle", 10.0, theorem1_oracle},
      {6, "planted meta-path recovery", 300.0, planted_recovery},
      {7, "depth effect", 300.0, depth_effect},
      {8, "quasi-linear scaling", 600.0, quasi_linear_scaling},
      {9, "mean-variant ablation", 60.0, mean_variant_ablation},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.budget_seconds) + " s budget";
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail
              << " (" << fmt("%.2f", secs) << " s)" << std::endl;
  }
  return failed;
}
