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

#include "hetconv/model.hpp"

#include <algorithm>
#include <cmath>

#include "hetconv/error.hpp"

namespace hetconv {

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out;
  for (auto& layer : layers) {
    for (auto& b : layer) {
      out.push_back(&b.w_self);
      for (auto& w : b.w_rel) out.push_back(&w);
      out.push_back(&b.w_q);
      out.push_back(&b.w_k);
      out.push_back(&b.w_a);
    }
  }
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  auto ptrs = const_cast<ModelParams*>(this)->tensors();
  return {ptrs.begin(), ptrs.end()};
}

std::vector<std::string> ModelParams::tensor_names() const {
  std::vector<std::string> out;
  const auto& types = schema.types();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "L" + std::to_string(l + 2) + "_";
    for (std::size_t t = 0; t < layers[l].size(); ++t) {
      const std::string p = prefix + types[t] + "_";
      out.push_back(p + "w_self");
      for (const auto& gamma : schema.neighbor_types(types[t])) {
        out.push_back(p + "w_rel_" + gamma);
      }
      out.push_back(p + "w_q");
      out.push_back(p + "w_k");
      out.push_back(p + "w_a");
    }
  }
  return out;
}

std::vector<long> default_hidden_widths(int num_layers) {
  if (num_layers < 2) throw ConfigError("a model needs at least 2 layers");
  // Non-input widths of the N-layer instance; the last entry is the output
  // layer, whose width is the class count instead.
  std::vector<long> widths;
  const int non_input = num_layers - 1;
  const std::vector<long> tail = {32, 16, 8};
  const int tail_len = std::min<int>(non_input - 1, static_cast<int>(tail.size()));
  for (int i = 0; i < non_input - tail_len; ++i) widths.push_back(64);
  for (int i = 0; i < tail_len; ++i) widths.push_back(tail[i]);
  widths.pop_back();
  return widths;
}

ModelShape make_shape(const Schema& schema, std::span<const long> feature_dims,
                      std::span<const long> hidden_widths,
                      const std::map<std::string, int>& output_widths,
                      long default_output, long d_a, bool mean_variant) {
  const auto& types = schema.types();
  if (feature_dims.size() != types.size()) {
    throw ShapeError("make_shape: " + std::to_string(feature_dims.size()) +
                     " feature widths for " + std::to_string(types.size()) +
                     " types");
  }
  if (d_a < 1) throw ConfigError("d_a must be positive");
  ModelShape shape;
  shape.d_a = d_a;
  shape.mean_variant = mean_variant;
  shape.dims.emplace_back(feature_dims.begin(), feature_dims.end());
  for (long w : hidden_widths) {
    if (w < 1) throw ConfigError("layer widths must be positive");
    shape.dims.emplace_back(types.size(), w);
  }
  std::vector<long> out(types.size(), default_output);
  for (const auto& [type, w] : output_widths) out[schema.type_index(type)] = w;
  for (long w : out) {
    if (w < 1) throw ConfigError("output widths must be positive");
  }
  shape.dims.push_back(std::move(out));
  return shape;
}

ModelParams init_params(const Schema& schema, const ModelShape& shape, Rng& rng) {
  if (shape.num_layers() < 2) throw ConfigError("a model needs at least 2 layers");
  ModelParams p;
  p.schema = schema;
  p.shape = shape;
  const auto& types = schema.types();
  for (std::size_t l = 0; l + 1 < shape.num_layers(); ++l) {
    std::vector<BlockParams> layer;
    for (std::size_t t = 0; t < types.size(); ++t) {
      const long d_out = shape.dims[l + 1][t];
      BlockParams b;
      b.w_self = xavier_uniform(shape.dims[l][t], d_out, rng);
      for (const auto& gamma : schema.neighbor_types(types[t])) {
        b.w_rel.push_back(
            xavier_uniform(shape.dims[l][schema.type_index(gamma)], d_out, rng));
      }
      b.w_q = xavier_uniform(d_out, shape.d_a, rng);
      b.w_k = xavier_uniform(d_out, shape.d_a, rng);
      b.w_a = xavier_uniform(2 * shape.d_a, 1, rng);
      layer.push_back(std::move(b));
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

void check_params(const ModelParams& p) {
  const auto& types = p.schema.types();
  const auto& shape = p.shape;
  if (p.layers.size() + 1 != shape.num_layers()) {
    throw ShapeError("model has " + std::to_string(p.layers.size()) +
                     " transitions but " + std::to_string(shape.num_layers()) +
                     " layer widths");
  }
  auto expect = [](const Matrix& m, long r, long c, const std::string& what) {
    if (m.rows() != r || m.cols() != c) {
      throw ShapeError(what + ": shape " + shape_str(m) + ", expected (" +
                       std::to_string(r) + "x" + std::to_string(c) + ")");
    }
  };
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    if (p.layers[l].size() != types.size() || shape.dims[l].size() != types.size() ||
        shape.dims[l + 1].size() != types.size()) {
      throw ShapeError("layer " + std::to_string(l + 2) + ": block count mismatch");
    }
    for (std::size_t t = 0; t < types.size(); ++t) {
      const auto& b = p.layers[l][t];
      const std::string where = "layer " + std::to_string(l + 2) + " block " + types[t];
      const long d_out = shape.dims[l + 1][t];
      expect(b.w_self, shape.dims[l][t], d_out, where + " w_self");
      auto neigh = p.schema.neighbor_types(types[t]);
      if (b.w_rel.size() != neigh.size()) {
        throw ShapeError(where + ": " + std::to_string(b.w_rel.size()) +
                         " relation projections for " +
                         std::to_string(neigh.size()) + " neighbor types");
      }
      for (std::size_t k = 0; k < neigh.size(); ++k) {
        expect(b.w_rel[k], shape.dims[l][p.schema.type_index(neigh[k])], d_out,
               where + " w_rel_" + neigh[k]);
      }
      expect(b.w_q, d_out, shape.d_a, where + " w_q");
      expect(b.w_k, d_out, shape.d_a, where + " w_k");
      expect(b.w_a, 2 * shape.d_a, 1, where + " w_a");
    }
  }
}

std::vector<Var> BoundParams::flat() const {
  std::vector<Var> out;
  for (const auto& layer : layers) {
    for (const auto& b : layer) {
      out.push_back(b.w_self);
      out.insert(out.end(), b.w_rel.begin(), b.w_rel.end());
      out.push_back(b.w_q);
      out.push_back(b.w_k);
      out.push_back(b.w_a);
    }
  }
  return out;
}

BoundParams bind_params(Tape& tape, const ModelParams& params) {
  BoundParams bp;
  for (const auto& layer : params.layers) {
    std::vector<BlockVars> bl;
    for (const auto& b : layer) {
      BlockVars v;
      v.w_self = tape.parameter(b.w_self);
      for (const auto& w : b.w_rel) v.w_rel.push_back(tape.parameter(w));
      v.w_q = tape.parameter(b.w_q);
      v.w_k = tape.parameter(b.w_k);
      v.w_a = tape.parameter(b.w_a);
      bl.push_back(std::move(v));
    }
    bp.layers.push_back(std::move(bl));
  }
  return bp;
}

Projection project(const BlockVars& block, Var h_self,
                   std::span<const Var> h_neigh, const std::string& block_name) {
  if (h_neigh.size() != block.w_rel.size()) {
    throw ShapeError(block_name + ": " + std::to_string(h_neigh.size()) +
                     " neighbor inputs for " + std::to_string(block.w_rel.size()) +
                     " relation projections");
  }
  auto checked = [&](Var h, Var w, const std::string& what) {
    if (h.cols() != w.rows()) {
      throw ShapeError(block_name + " " + what + ": input " + shape_str(h.value()) +
                       " vs projection " + shape_str(w.value()));
    }
    return matmul(h, w);
  };
  Projection y;
  y.y_self = checked(h_self, block.w_self, "self");
  for (std::size_t k = 0; k < h_neigh.size(); ++k) {
    y.y_rel.push_back(checked(h_neigh[k], block.w_rel[k],
                              "relation " + std::to_string(k)));
  }
  return y;
}

Convolved hetero_conv(const Projection& y, std::span<const SparseAdj* const> adj) {
  if (adj.size() != y.y_rel.size()) {
    throw ShapeError("hetero_conv: " + std::to_string(adj.size()) +
                     " adjacency matrices for " + std::to_string(y.y_rel.size()) +
                     " relations");
  }
  Convolved z;
  z.z_self = y.y_self;
  for (std::size_t k = 0; k < adj.size(); ++k) {
    const SparseAdj& a = *adj[k];
    if (!is_row_normalized(a, 1e-6)) {
      throw NumericalError("hetero_conv: adjacency " + std::to_string(k) +
                           " is not row-normalized");
    }
    if (a.rows() != y.y_self.rows()) {
      throw ShapeError("hetero_conv: adjacency " + std::to_string(k) + " has " +
                       std::to_string(a.rows()) + " rows for " +
                       std::to_string(y.y_self.rows()) + " objects");
    }
    z.z_rel.push_back(spmm(a, y.y_rel[k]));
  }
  return z;
}

BlockOutput type_attention(const BlockVars& block, const Convolved& z,
                           bool mean_variant) {
  Tape* tape = z.z_self.tape();
  const long n = z.z_self.rows();
  const long width = z.z_self.cols();
  std::vector<Var> values;
  values.push_back(z.z_self);
  for (const auto& zr : z.z_rel) {
    if (zr.cols() != width || zr.rows() != n) {
      throw ShapeError("type_attention: convolved input " + shape_str(zr.value()) +
                       " vs self " + shape_str(z.z_self.value()));
    }
    values.push_back(zr);
  }
  const long k = static_cast<long>(values.size());
  Var attention;
  if (mean_variant) {
    attention = tape->constant(Matrix::Constant(n, k, 1.0 / static_cast<double>(k)));
  } else {
    Var q = matmul(z.z_self, block.w_q);
    std::vector<Var> logits;
    for (const auto& v : values) {
      Var key = matmul(v, block.w_k);
      logits.push_back(matmul(concat_cols(key, q), block.w_a));
    }
    attention = softmax_rows(elu(concat_cols(logits)));
  }
  BlockOutput out;
  out.h_new = elu(weighted_combine(attention, values));
  out.attention = attention.value();
  return out;
}

PreparedGraph::PreparedGraph(const HinGraph& g)
    : graph(&g), normalized(normalized_adjacency(g)) {}

BoundParams unflatten_params(const ModelParams& layout, std::span<const Var> flat) {
  BoundParams bp;
  std::size_t k = 0;
  auto next = [&]() {
    if (k >= flat.size()) {
      throw ShapeError("unflatten_params: " + std::to_string(flat.size()) +
                       " variables for a larger model");
    }
    return flat[k++];
  };
  for (const auto& layer : layout.layers) {
    std::vector<BlockVars> bl;
    for (const auto& b : layer) {
      BlockVars v;
      v.w_self = next();
      for (std::size_t r = 0; r < b.w_rel.size(); ++r) v.w_rel.push_back(next());
      v.w_q = next();
      v.w_k = next();
      v.w_a = next();
      bl.push_back(std::move(v));
    }
    bp.layers.push_back(std::move(bl));
  }
  if (k != flat.size()) {
    throw ShapeError("unflatten_params: " + std::to_string(flat.size()) +
                     " variables for " + std::to_string(k) + " tensors");
  }
  return bp;
}

ForwardResult forward(const ModelParams& params, const PreparedGraph& pg,
                      Mode mode, double dropout_rate, Rng& rng, Tape& tape) {
  check_params(params);
  return forward(params, bind_params(tape, params), pg, mode, dropout_rate, rng, tape);
}

ForwardResult forward(const ModelParams& layout, BoundParams bound,
                      const PreparedGraph& pg, Mode mode, double dropout_rate,
                      Rng& rng, Tape& tape) {
  const ModelParams& params = layout;
  const HinGraph& g = *pg.graph;
  const Schema& schema = g.schema;
  if (params.schema.types() != schema.types() ||
      !(params.schema.relations() == schema.relations())) {
    throw ShapeError("model schema does not match graph schema");
  }
  const auto& types = schema.types();
  if (bound.layers.size() != params.layers.size()) {
    throw ShapeError("forward: bound parameters have " + std::to_string(bound.layers.size()) +
                     " transitions, model has " + std::to_string(params.layers.size()));
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    if (g.features[t].cols() != params.shape.dims[0][t]) {
      throw ShapeError("layer 1 block " + types[t] + ": features have " +
                       std::to_string(g.features[t].cols()) +
                       " columns, model expects " +
                       std::to_string(params.shape.dims[0][t]));
    }
  }

  ForwardResult res;
  res.bound = std::move(bound);
  std::vector<Var> h;
  for (const auto& f : g.features) h.push_back(tape.constant_ref(f));

  // Neighbor structure per block, fixed across layers.
  std::vector<std::vector<std::size_t>> neigh_types(types.size());
  std::vector<std::vector<const SparseAdj*>> neigh_adj(types.size());
  for (std::size_t t = 0; t < types.size(); ++t) {
    for (std::size_t r : schema.incoming_relations(types[t])) {
      neigh_types[t].push_back(schema.type_index(schema.relations()[r].src));
      neigh_adj[t].push_back(&pg.normalized[r]);
    }
  }

  const std::size_t transitions = params.layers.size();
  const bool training = mode == Mode::kTrain;
  for (std::size_t l = 0; l < transitions; ++l) {
    std::vector<Var> next;
    std::vector<Matrix> att;
    for (std::size_t t = 0; t < types.size(); ++t) {
      const BlockVars& bv = res.bound.layers[l][t];
      std::vector<Var> hn;
      for (std::size_t gi : neigh_types[t]) hn.push_back(h[gi]);
      const std::string name = "layer " + std::to_string(l + 2) + " block " + types[t];
      Projection y = project(bv, h[t], hn, name);
      Convolved z = hetero_conv(y, neigh_adj[t]);
      BlockOutput out = type_attention(bv, z, params.shape.mean_variant);
      Var hv = out.h_new;
      if (l + 1 < transitions) hv = dropout(hv, dropout_rate, training, rng);
      next.push_back(hv);
      att.push_back(std::move(out.attention));
    }
    h = std::move(next);
    res.attention.push_back(std::move(att));
  }
  res.final = std::move(h);
  return res;
}

double spectral_equivalence_check(const Matrix& h_omega, const Matrix& h_gamma,
                                  const Matrix& theta0, const Matrix& theta1,
                                  const SparseAdj& a_og, const SparseAdj& a_go) {
  const long n_o = h_omega.rows();
  const long n_g = h_gamma.rows();
  const long d_o = h_omega.cols();
  const long d_g = h_gamma.cols();
  const long d = std::max(d_o, d_g);
  if (a_og.rows() != n_o || a_og.cols() != n_g || a_go.rows() != n_g ||
      a_go.cols() != n_o) {
    throw ShapeError("spectral_equivalence_check: adjacency shapes do not match "
                     "the representation matrices");
  }
  if (theta0.rows() != d || theta1.rows() != d || theta0.cols() != theta1.cols()) {
    throw ShapeError("spectral_equivalence_check: thetas must be " +
                     std::to_string(d) + " x d_out, got " + shape_str(theta0) +
                     " and " + shape_str(theta1));
  }

  // Spectral route on the augmented bipartite graph.
  const long n = n_o + n_g;
  Matrix a_aug = Matrix::Zero(n, n);
  a_aug.topRightCorner(n_o, n_g) = a_og.to_dense();
  a_aug.bottomLeftCorner(n_g, n_o) = a_go.to_dense();
  Matrix p_aug = a_aug;
  for (long i = 0; i < n; ++i) {
    const double deg = a_aug.row(i).sum();
    if (deg > 0.0) p_aug.row(i) /= deg;
  }
  Matrix h_aug = Matrix::Zero(n, d);
  h_aug.topLeftCorner(n_o, d_o) = h_omega;
  h_aug.bottomLeftCorner(n_g, d_g) = h_gamma;
  Matrix spectral = p_aug * h_aug * theta1 + h_aug * theta0;

  // Per-type convolution route with shared parameters.
  SparseAdj norm_og = row_normalize(a_og);
  SparseAdj norm_go = row_normalize(a_go);
  Tape tape;
  auto conv = [&](const Matrix& h_self, long d_self, const Matrix& h_other,
                  long d_other, const SparseAdj& norm) {
    BlockVars bv;
    bv.w_self = tape.constant(theta0.topRows(d_self));
    bv.w_rel.push_back(tape.constant(theta1.topRows(d_other)));
    Var hs = tape.constant_ref(h_self);
    Var ho[] = {tape.constant_ref(h_other)};
    Projection y = project(bv, hs, ho);
    const SparseAdj* adj[] = {&norm};
    Convolved z = hetero_conv(y, adj);
    return Matrix(z.z_self.value() + z.z_rel[0].value());
  };
  Matrix z_o = conv(h_omega, d_o, h_gamma, d_g, norm_og);
  Matrix z_g = conv(h_gamma, d_g, h_omega, d_o, norm_go);

  double dev = (spectral.topRows(n_o) - z_o).cwiseAbs().maxCoeff();
  if (n_g > 0) dev = std::max(dev, (spectral.bottomRows(n_g) - z_g).cwiseAbs().maxCoeff());
  return dev;
}

double spectral_equivalence_check(const HinGraph& g, const std::string& omega,
                                  const std::string& gamma, const Matrix& theta0,
                                  const Matrix& theta1) {
  auto og = g.schema.relation_index(gamma, omega);
  auto go = g.schema.relation_index(omega, gamma);
  if (!og || !go) {
    throw ConfigError("spectral_equivalence_check: needs both " + gamma + "->" +
                      omega + " and " + omega + "->" + gamma);
  }
  return spectral_equivalence_check(g.feature(omega), g.feature(gamma), theta0,
                                    theta1, g.adjacency[*og], g.adjacency[*go]);
}

}  // namespace hetconv
