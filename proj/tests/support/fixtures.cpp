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

#include "fixtures.hpp"

#include <cmath>

namespace hetconv::testing {

namespace {

Matrix dense_elu(const Matrix& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? v : std::exp(v) - 1.0; });
}

Matrix dense_row_normalize(const Matrix& a) {
  Matrix out = a;
  for (long i = 0; i < a.rows(); ++i) {
    const double s = a.row(i).sum();
    if (s != 0.0) out.row(i) /= s;
  }
  return out;
}

void set_pair(HinGraph& g, const std::string& src, const std::string& dst,
              const std::vector<Triplet>& dst_rows) {
  const long rows = g.features[g.schema.type_index(dst)].rows();
  const long cols = g.features[g.schema.type_index(src)].rows();
  SparseAdj a = SparseAdj::from_triplets(rows, cols, dst_rows);
  g.adjacency[*g.schema.relation_index(dst, src)] = a.transpose();
  g.adjacency[*g.schema.relation_index(src, dst)] = std::move(a);
}

}  // namespace

HinGraph toy_hin() {
  HinGraph g;
  g.schema = dblp_schema();  // types P, A, C, T
  auto fill = [](long n, long d, double phase) {
    Matrix m(n, d);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < d; ++j) m(i, j) = std::sin(phase + 1.3 * static_cast<double>(i) + 0.7 * static_cast<double>(j));
    }
    return m;
  };
  g.features = {fill(2, 3, 0.1), fill(2, 2, 0.9), fill(1, 2, 1.7), fill(1, 3, 2.5)};
  g.adjacency.resize(g.schema.relations().size());
  set_pair(g, "C", "P", {{0, 0, 1.0}, {1, 0, 1.0}});
  set_pair(g, "A", "P", {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 1.0}});
  set_pair(g, "T", "P", {{0, 0, 1.0}, {1, 0, 1.0}});
  g.labels["A"] = {0, 1};
  g.class_counts["A"] = 2;
  g.splits["A"] = Split{{0}, {1}, {}};
  return g;
}

HinGraph random_tiny_hin(Rng& rng, long max_objects, bool connected) {
  HinGraph g;
  g.schema = dblp_schema();
  std::map<std::string, long> n;
  do {
    n = {{"P", 2 + static_cast<long>(rng.uniform_int(3))},
         {"A", 1 + static_cast<long>(rng.uniform_int(3))},
         {"C", 1 + static_cast<long>(rng.uniform_int(2))},
         {"T", 1 + static_cast<long>(rng.uniform_int(2))}};
  } while (n["P"] + n["A"] + n["C"] + n["T"] > max_objects);
  for (const auto& t : g.schema.types()) {
    const long d = 2 + static_cast<long>(rng.uniform_int(2));
    Matrix f(n[t], d);
    for (long i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform(-1.0, 1.0);
    g.features.push_back(f);
  }
  g.adjacency.resize(g.schema.relations().size());
  for (const std::string other : {"C", "A", "T"}) {
    std::vector<Triplet> trip;
    const long np = n["P"], no = n[other];
    std::vector<std::vector<bool>> on(static_cast<std::size_t>(np),
                                      std::vector<bool>(static_cast<std::size_t>(no)));
    for (long p = 0; p < np; ++p) {
      for (long o = 0; o < no; ++o) on[p][o] = rng.bernoulli(0.5);
    }
    if (connected) {
      for (long p = 0; p < np; ++p) on[p][rng.uniform_int(no)] = true;
      for (long o = 0; o < no; ++o) on[rng.uniform_int(np)][o] = true;
    }
    for (long p = 0; p < np; ++p) {
      for (long o = 0; o < no; ++o) {
        if (on[p][o]) trip.push_back({p, o, rng.uniform(0.5, 2.0)});
      }
    }
    set_pair(g, other, "P", trip);
  }
  std::vector<int> labels(static_cast<std::size_t>(n["A"]));
  for (auto& l : labels) l = static_cast<int>(rng.uniform_int(2));
  g.labels["A"] = labels;
  g.class_counts["A"] = 2;
  return g;
}

DenseForward dense_forward(const ModelParams& params, const HinGraph& g) {
  const Schema& s = g.schema;
  const auto& types = s.types();
  std::vector<Matrix> h = g.features;
  DenseForward out;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    std::vector<Matrix> next;
    std::vector<Matrix> att;
    for (std::size_t t = 0; t < types.size(); ++t) {
      const BlockParams& b = params.layers[l][t];
      std::vector<Matrix> z = {h[t] * b.w_self};
      const auto rels = s.incoming_relations(types[t]);
      for (std::size_t k = 0; k < rels.size(); ++k) {
        const std::size_t src = s.type_index(s.relations()[rels[k]].src);
        Matrix p = dense_row_normalize(g.adjacency[rels[k]].to_dense());
        z.push_back(p * (h[src] * b.w_rel[k]));
      }
      const long n = h[t].rows();
      const long kk = static_cast<long>(z.size());
      const long d_a = b.w_q.cols();
      Matrix q = z[0] * b.w_q;
      Matrix a(n, kk);
      for (long v = 0; v < kk; ++v) {
        Matrix key = z[static_cast<std::size_t>(v)] * b.w_k;
        Matrix e = key * b.w_a.topRows(d_a) + q * b.w_a.bottomRows(d_a);
        a.col(v) = dense_elu(e).col(0);
      }
      for (long i = 0; i < n; ++i) {
        double denom = 0.0;
        for (long v = 0; v < kk; ++v) denom += std::exp(a(i, v));
        for (long v = 0; v < kk; ++v) a(i, v) = std::exp(a(i, v)) / denom;
      }
      if (params.shape.mean_variant) a.setConstant(1.0 / static_cast<double>(kk));
      Matrix mix = Matrix::Zero(n, z[0].cols());
      for (long v = 0; v < kk; ++v) {
        for (long i = 0; i < n; ++i) mix.row(i) += a(i, v) * z[static_cast<std::size_t>(v)].row(i);
      }
      next.push_back(dense_elu(mix));
      att.push_back(a);
    }
    h = std::move(next);
    out.attention.push_back(std::move(att));
  }
  out.final = std::move(h);
  return out;
}

std::map<std::vector<std::string>, std::vector<double>> brute_force_path_scores(
    const HinGraph& g, const std::vector<std::vector<Matrix>>& attention,
    const std::string& target) {
  const Schema& s = g.schema;
  std::vector<Matrix> norm;
  for (const auto& a : g.adjacency) norm.push_back(dense_row_normalize(a.to_dense()));
  const std::size_t ti = s.type_index(target);
  const long n_target = g.features[ti].rows();
  std::map<std::vector<std::string>, std::vector<double>> out;

  // Walks backward from (transition, type, object); `hops` holds the types
  // entered by relation hops, nearest to the target first.
  auto rec = [&](auto&& self, long transition, std::size_t t, long obj, double w,
                 std::vector<std::string>& hops, long root) -> void {
    if (w == 0.0) return;
    if (transition < 0) {
      std::vector<std::string> path(hops.rbegin(), hops.rend());
      path.push_back(target);
      auto& v = out[path];
      if (v.empty()) v.assign(static_cast<std::size_t>(n_target), 0.0);
      v[static_cast<std::size_t>(root)] += w;
      return;
    }
    const Matrix& a = attention[static_cast<std::size_t>(transition)][t];
    self(self, transition - 1, t, obj, w * a(obj, 0), hops, root);
    const auto rels = s.incoming_relations(s.types()[t]);
    for (std::size_t k = 0; k < rels.size(); ++k) {
      const std::size_t src = s.type_index(s.relations()[rels[k]].src);
      const Matrix& p = norm[rels[k]];
      for (long j = 0; j < p.cols(); ++j) {
        if (p(obj, j) == 0.0) continue;
        hops.push_back(s.types()[src]);
        self(self, transition - 1, src, j, w * a(obj, static_cast<long>(k + 1)) * p(obj, j),
             hops, root);
        hops.pop_back();
      }
    }
  };
  for (long o = 0; o < n_target; ++o) {
    std::vector<std::string> hops;
    rec(rec, static_cast<long>(attention.size()) - 1, ti, o, 1.0, hops, o);
  }
  return out;
}

long walk_count(const Schema& s, const std::string& target, int steps) {
  const long n = static_cast<long>(s.num_types());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (const auto& r : s.relations()) {
    // Backward step: from the dst block to the src type.
    m(static_cast<long>(s.type_index(r.dst)), static_cast<long>(s.type_index(r.src))) += 1.0;
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < steps; ++i) p = p * m;
  return std::lround(p.row(static_cast<long>(s.type_index(target))).sum());
}

AttentionSummary published_dblp_summary() {
  // Columns as printed: P [Self, A, C, T]; A, C, T [Self, P].
  const std::string text = R"({"transitions": [
    {"blocks": [
      {"type": "P", "columns": ["Self", "A", "C", "T"], "coefficients": [0.06, 0.06, 0.82, 0.06]},
      {"type": "A", "columns": ["Self", "P"], "coefficients": [0.50, 0.50]},
      {"type": "C", "columns": ["Self", "P"], "coefficients": [0.63, 0.37]},
      {"type": "T", "columns": ["Self", "P"], "coefficients": [0.50, 0.50]}]},
    {"blocks": [
      {"type": "P", "columns": ["Self", "A", "C", "T"], "coefficients": [0.64, 0.04, 0.27, 0.05]},
      {"type": "A", "columns": ["Self", "P"], "coefficients": [0.20, 0.80]},
      {"type": "C", "columns": ["Self", "P"], "coefficients": [0.37, 0.63]},
      {"type": "T", "columns": ["Self", "P"], "coefficients": [0.06, 0.94]}]},
    {"blocks": [
      {"type": "P", "columns": ["Self", "A", "C", "T"], "coefficients": [0.25, 0.25, 0.25, 0.25]},
      {"type": "A", "columns": ["Self", "P"], "coefficients": [0.49, 0.51]},
      {"type": "C", "columns": ["Self", "P"], "coefficients": [0.42, 0.58]},
      {"type": "T", "columns": ["Self", "P"], "coefficients": [0.19, 0.81]}]},
    {"blocks": [
      {"type": "A", "columns": ["Self", "P"], "coefficients": [0.43, 0.57]}]}
  ]})";
  return parse_attention_summary(dblp_schema(), text);
}

}  // namespace hetconv::testing
