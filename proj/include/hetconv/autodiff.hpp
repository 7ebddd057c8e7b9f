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

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "hetconv/hin.hpp"
#include "hetconv/matrix.hpp"
#include "hetconv/rng.hpp"

namespace hetconv {

class Tape;

// Handle to a value recorded on a Tape (the GradMatrix of the model code).
// Cheap to copy; valid while its tape is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  // Accumulated gradient; an empty matrix when nothing flowed back.
  const Matrix& grad() const;
  long rows() const { return value().rows(); }
  long cols() const { return value().cols(); }
  bool requires_grad() const;

  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Records primitive operations in execution order; backward() replays them in
// exact reverse order. Not thread-safe: one tape belongs to one run.
class Tape {
 public:
  // Receives the node's own gradient and value.
  using Backward =
      std::function<void(Tape&, const Matrix& out_grad, const Matrix& out_value)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Borrows `value`; the caller keeps it alive for the tape's lifetime.
  Var constant_ref(const Matrix& value);
  Var parameter(Matrix value);

  // Records a derived node. `inputs` decide whether it requires a gradient;
  // `backward` is only invoked when it does.
  Var record(Matrix value, std::span<const Var> inputs, Backward backward);

  void backward(Var out);
  void backward(Var out, const Matrix& seed);

  // Gradient slot for accumulation, zero-initialized on first use.
  Matrix& grad_slot(const Var& v);

  const Matrix& value(const Var& v) const;
  const Matrix& grad(const Var& v) const;
  bool requires_grad(const Var& v) const { return node(v).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* borrowed = nullptr;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;

    const Matrix& value() const { return borrowed ? *borrowed : owned; }
  };

  const Node& node(const Var& v) const;
  Node& node(const Var& v);

  std::deque<Node> nodes_;
};

// C = A B.
Var matmul(Var a, Var b);
// C = S B for a sparse S that outlives the tape; S carries no gradient.
Var spmm(const SparseAdj& s, Var b);
Var elu(Var x);
Var softmax_rows(Var x);
Var concat_cols(Var a, Var b);
Var concat_cols(std::span<const Var> parts);
// Inverted dropout: training zeroes each entry with probability `rate` and
// scales survivors by 1/(1-rate); evaluation is the identity.
Var dropout(Var x, double rate, bool training, Rng& rng);
// Applies a fixed 0/1 keep-mask with inverted scaling (replayable dropout).
Var dropout_with_mask(Var x, const Matrix& keep_mask, double rate);
Var add(Var a, Var b);
Var scale(Var a, double s);
Var hadamard(Var a, Var b);
Var sum_all(Var a);
Var row_select(Var x, std::span<const long> rows);
// out_i = sum_k weights(i, k) * values[k]_i, one weight column per value.
Var weighted_combine(Var weights, std::span<const Var> values);
// Summed cross-entropy of row-softmax(logits) against integer classes, over
// the listed rows. Result is 1x1.
Var softmax_cross_entropy(Var logits, std::span<const long> rows,
                          std::span<const int> classes);

// Pins intra-kernel parallelism (no-op without OpenMP). 0 keeps the default.
void set_num_threads(int n);
int num_threads();

}  // namespace hetconv
