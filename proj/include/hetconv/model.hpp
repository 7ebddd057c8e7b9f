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

#include <span>
#include <string>
#include <vector>

#include "hetconv/autodiff.hpp"
#include "hetconv/hin.hpp"
#include "hetconv/rng.hpp"

namespace hetconv {

// Parameters of one type's block in one layer. w_rel is aligned with the
// schema's neighbor_types of the block type.
struct BlockParams {
  Matrix w_self;              // d_in(self) x d_out
  std::vector<Matrix> w_rel;  // d_in(Gamma) x d_out, one per neighbor type
  Matrix w_q;                 // d_out x d_a
  Matrix w_k;                 // d_out x d_a
  Matrix w_a;                 // 2 d_a x 1
};

// Per-layer widths: dims[0] are the feature widths, dims[n] the output widths
// of layer n + 1 (Algorithm numbering starts at 1 for the input layer).
struct ModelShape {
  std::vector<std::vector<long>> dims;  // [layer][type], schema type order
  long d_a = 64;
  bool mean_variant = false;

  std::size_t num_layers() const { return dims.size(); }
};

struct ModelParams {
  Schema schema;
  ModelShape shape;
  // layers[l][t]: block of type t in the transition from layer l+1 to l+2.
  std::vector<std::vector<BlockParams>> layers;

  // Flat views in a fixed order (layer, type, w_self, w_rel..., w_q, w_k, w_a).
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  // Names "L<layer>_<type>_<param>" aligned with tensors(); <layer> counts
  // from 2 as in Algorithm 1.
  std::vector<std::string> tensor_names() const;
};

// Widths for an N-layer model: hidden widths for layers 2..N-1, then the
// output widths (class count for labeled types, `default_output` elsewhere).
ModelShape make_shape(const Schema& schema, std::span<const long> feature_dims,
                      std::span<const long> hidden_widths,
                      const std::map<std::string, int>& output_widths,
                      long default_output, long d_a, bool mean_variant);

// Default hidden widths for an N-layer model, taken from the widths sweep
// [64], [64, 32], [64, 32, 16], [64, 32, 16, 8], ... minus the output layer.
std::vector<long> default_hidden_widths(int num_layers);

ModelParams init_params(const Schema& schema, const ModelShape& shape, Rng& rng);

// Checks param shapes against the schema and shape; throws ShapeError
// naming the offending layer/block/param.
void check_params(const ModelParams& params);

// Model parameters bound as tape leaves.
struct BlockVars {
  Var w_self;
  std::vector<Var> w_rel;
  Var w_q;
  Var w_k;
  Var w_a;
};

struct BoundParams {
  std::vector<std::vector<BlockVars>> layers;
  std::vector<Var> flat() const;  // same order as ModelParams::tensors()
};

BoundParams bind_params(Tape& tape, const ModelParams& params);
// Regroups variables given in ModelParams::tensors() order.
BoundParams unflatten_params(const ModelParams& layout, std::span<const Var> flat);

struct Projection {
  Var y_self;
  std::vector<Var> y_rel;
};

struct Convolved {
  Var z_self;
  std::vector<Var> z_rel;
};

struct BlockOutput {
  Var h_new;
  // |V| x (1 + |N|) normalized coefficients; column 0 is Self, then the
  // neighbor types in schema order.
  Matrix attention;
};

// Y_self = H_self W_self, Y_Gamma = H_Gamma W_Gamma.
Projection project(const BlockVars& block, Var h_self, std::span<const Var> h_neigh,
                   const std::string& block_name = "block");

// Z_self = Y_self, Z_Gamma = A_hat Y_Gamma. Each A_hat must be row-normalized
// (throws NumericalError otherwise) and outlive the tape.
Convolved hetero_conv(const Projection& y, std::span<const SparseAdj* const> adj);

// Type-level attention over {Self} + neighbor types, then ELU of the
// attention-weighted sum. mean_variant replaces the coefficients by the
// uniform 1 / (1 + |N|).
BlockOutput type_attention(const BlockVars& block, const Convolved& z,
                           bool mean_variant);

// Graph prepared for convolution: owns the row-normalized adjacency.
struct PreparedGraph {
  explicit PreparedGraph(const HinGraph& g);

  const HinGraph* graph;
  std::vector<SparseAdj> normalized;
};

enum class Mode { kTrain, kEval };

struct ForwardResult {
  std::vector<Var> final;  // H[N] per type, schema order
  // attention[l][t]: coefficients of block t in transition l+1 -> l+2.
  std::vector<std::vector<Matrix>> attention;
  BoundParams bound;
};

ForwardResult forward(const ModelParams& params, const PreparedGraph& g,
                      Mode mode, double dropout_rate, Rng& rng, Tape& tape);
// Same, with parameters already on the tape; `layout` supplies the shapes.
ForwardResult forward(const ModelParams& layout, BoundParams bound,
                      const PreparedGraph& g, Mode mode, double dropout_rate,
                      Rng& rng, Tape& tape);

// Builds the augmented adjacency over V_omega + V_gamma explicitly, computes
// P~ H~ theta1 + H~ theta0 with zero-padded H~, and compares block-wise with
// the per-type convolution using w_self = theta0 and w_rel = theta1 (rows cut
// to each type's width). Returns the max absolute deviation.
// a_og: |V_omega| x |V_gamma|, a_go: |V_gamma| x |V_omega|, both unnormalized.
// theta0/theta1: max(d_omega, d_gamma) x d_out.
double spectral_equivalence_check(const Matrix& h_omega, const Matrix& h_gamma,
                                  const Matrix& theta0, const Matrix& theta1,
                                  const SparseAdj& a_og, const SparseAdj& a_go);

// Graph form: needs both <gamma, omega> and <omega, gamma>.
double spectral_equivalence_check(const HinGraph& g, const std::string& omega,
                                  const std::string& gamma, const Matrix& theta0,
                                  const Matrix& theta1);

}  // namespace hetconv
