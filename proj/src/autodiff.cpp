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

#include "hetconv/autodiff.hpp"

#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hetconv/error.hpp"

namespace hetconv {

const Matrix& Var::value() const { return tape_->value(*this); }
const Matrix& Var::grad() const { return tape_->grad(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(*this); }

const Tape::Node& Tape::node(const Var& v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    throw Error("Var does not belong to this tape");
  }
  return nodes_[v.id_];
}

Tape::Node& Tape::node(const Var& v) {
  return const_cast<Node&>(static_cast<const Tape*>(this)->node(v));
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, false, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant_ref(const Matrix& value) {
  nodes_.push_back(Node{{}, &value, {}, false, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, true, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::span<const Var> inputs, Backward backward) {
  bool needs = false;
  for (const auto& in : inputs) needs = needs || node(in).requires_grad;
  nodes_.push_back(Node{std::move(value), nullptr, {}, needs,
                        needs ? std::move(backward) : nullptr});
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::value(const Var& v) const { return node(v).value(); }

const Matrix& Tape::grad(const Var& v) const { return node(v).grad; }

Matrix& Tape::grad_slot(const Var& v) {
  Node& n = node(v);
  if (n.grad.size() == 0) {
    const Matrix& val = n.value();
    n.grad = Matrix::Zero(val.rows(), val.cols());
  }
  return n.grad;
}

void Tape::backward(Var out) {
  const Matrix& v = value(out);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("backward() without a seed needs a 1x1 output, got " +
                     shape_str(v));
  }
  backward(out, Matrix::Ones(1, 1));
}

void Tape::backward(Var out, const Matrix& seed) {
  const Matrix& v = value(out);
  if (seed.rows() != v.rows() || seed.cols() != v.cols()) {
    throw ShapeError("backward seed " + shape_str(seed) + " vs output " +
                     shape_str(v));
  }
  grad_slot(out) += seed;
  for (std::size_t i = out.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
    n.backward(*this, n.grad, n.value());
  }
}

Var matmul(Var a, Var b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: " + shape_str(av) + " x " + shape_str(bv));
  }
  Matrix c(av.rows(), bv.cols());
  c.noalias() = av * bv;
  Var inputs[] = {a, b};
  return a.tape()->record(
      std::move(c), inputs, [a, b](Tape& t, const Matrix& g, const Matrix&) {
        if (t.requires_grad(a)) {
          t.grad_slot(a).noalias() += g * t.value(b).transpose();
        }
        if (t.requires_grad(b)) {
          t.grad_slot(b).noalias() += t.value(a).transpose() * g;
        }
      });
}

namespace {

// out += S * b
void spmm_accumulate(const SparseAdj& s, const Matrix& b, Matrix& out) {
  const auto rp = s.row_ptr();
  const auto ci = s.col_idx();
  const auto vs = s.values();
  const long n = s.rows();
#pragma omp parallel for schedule(static) if (n > 4096)
  for (long i = 0; i < n; ++i) {
    for (long k = rp[i]; k < rp[i + 1]; ++k) {
      out.row(i).noalias() += vs[k] * b.row(ci[k]);
    }
  }
}

// out += S^T * g, scattered row by row.
void spmm_transpose_accumulate(const SparseAdj& s, const Matrix& g,
                               Matrix& out) {
  const auto rp = s.row_ptr();
  const auto ci = s.col_idx();
  const auto vs = s.values();
  for (long i = 0; i < s.rows(); ++i) {
    for (long k = rp[i]; k < rp[i + 1]; ++k) {
      out.row(ci[k]).noalias() += vs[k] * g.row(i);
    }
  }
}

}  // namespace

Var spmm(const SparseAdj& s, Var b) {
  const Matrix& bv = b.value();
  if (s.cols() != bv.rows()) {
    throw ShapeError("spmm: sparse " + std::to_string(s.rows()) + "x" +
                     std::to_string(s.cols()) + " x dense " + shape_str(bv));
  }
  Matrix c = Matrix::Zero(s.rows(), bv.cols());
  spmm_accumulate(s, bv, c);
  const SparseAdj* sp = &s;
  Var inputs[] = {b};
  return b.tape()->record(std::move(c), inputs,
                          [sp, b](Tape& t, const Matrix& g, const Matrix&) {
                            spmm_transpose_accumulate(*sp, g, t.grad_slot(b));
                          });
}

Var elu(Var x) {
  Matrix y = x.value().unaryExpr(
      [](double v) { return v > 0.0 ? v : std::expm1(v); });
  Var inputs[] = {x};
  return x.tape()->record(
      std::move(y), inputs, [x](Tape& t, const Matrix& g, const Matrix& y) {
        // d/dx: 1 for x > 0, e^x = y + 1 otherwise.
        const Matrix& xv = t.value(x);
        Matrix& gx = t.grad_slot(x);
        for (long i = 0; i < xv.rows(); ++i) {
          for (long j = 0; j < xv.cols(); ++j) {
            gx(i, j) += g(i, j) * (xv(i, j) > 0.0 ? 1.0 : y(i, j) + 1.0);
          }
        }
      });
}

Var softmax_rows(Var x) {
  const Matrix& xv = x.value();
  Matrix y(xv.rows(), xv.cols());
  for (long i = 0; i < xv.rows(); ++i) {
    const double m = xv.row(i).maxCoeff();
    y.row(i) = (xv.row(i).array() - m).exp().matrix();
    y.row(i) /= y.row(i).sum();
  }
  Var inputs[] = {x};
  return x.tape()->record(
      std::move(y), inputs, [x](Tape& t, const Matrix& g, const Matrix& y) {
        // dx_i = y_i * (g_i - <g, y>) per row.
        Matrix& gx = t.grad_slot(x);
        for (long i = 0; i < y.rows(); ++i) {
          const double dot = g.row(i).dot(y.row(i));
          gx.row(i).array() += y.row(i).array() * (g.row(i).array() - dot);
        }
      });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const long rows = parts[0].rows();
  long cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) {
      throw ShapeError("concat_cols: row mismatch " + shape_str(parts[0].value()) +
                       " vs " + shape_str(p.value()));
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  long c0 = 0;
  for (const auto& p : parts) {
    out.middleCols(c0, p.cols()) = p.value();
    c0 += p.cols();
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return parts[0].tape()->record(
      std::move(out), parts, [saved](Tape& t, const Matrix& g, const Matrix&) {
        long c0 = 0;
        for (const auto& p : saved) {
          const long w = t.value(p).cols();
          if (t.requires_grad(p)) t.grad_slot(p) += g.middleCols(c0, w);
          c0 += w;
        }
      });
}

Var concat_cols(Var a, Var b) {
  Var parts[] = {a, b};
  return concat_cols(parts);
}

Var dropout_with_mask(Var x, const Matrix& keep_mask, double rate) {
  const Matrix& xv = x.value();
  if (keep_mask.rows() != xv.rows() || keep_mask.cols() != xv.cols()) {
    throw ShapeError("dropout: mask " + shape_str(keep_mask) + " vs input " +
                     shape_str(xv));
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix scale_mask = keep_mask * keep_scale;
  Matrix y = xv.cwiseProduct(scale_mask);
  Var inputs[] = {x};
  return x.tape()->record(
      std::move(y), inputs,
      [x, m = std::move(scale_mask)](Tape& t, const Matrix& g, const Matrix&) {
        t.grad_slot(x) += g.cwiseProduct(m);
      });
}

Var dropout(Var x, double rate, bool training, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1), got " +
                      std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const Matrix& xv = x.value();
  Matrix mask(xv.rows(), xv.cols());
  for (long i = 0; i < mask.rows(); ++i) {
    for (long j = 0; j < mask.cols(); ++j) {
      mask(i, j) = rng.uniform() < rate ? 0.0 : 1.0;
    }
  }
  return dropout_with_mask(x, mask, rate);
}

Var add(Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("add: " + shape_str(a.value()) + " vs " + shape_str(b.value()));
  }
  Matrix c = a.value() + b.value();
  Var inputs[] = {a, b};
  return a.tape()->record(std::move(c), inputs,
                          [a, b](Tape& t, const Matrix& g, const Matrix&) {
                            if (t.requires_grad(a)) t.grad_slot(a) += g;
                            if (t.requires_grad(b)) t.grad_slot(b) += g;
                          });
}

Var scale(Var a, double s) {
  Matrix c = a.value() * s;
  Var inputs[] = {a};
  return a.tape()->record(std::move(c), inputs,
                          [a, s](Tape& t, const Matrix& g, const Matrix&) {
                            t.grad_slot(a) += s * g;
                          });
}

Var hadamard(Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("hadamard: " + shape_str(a.value()) + " vs " +
                     shape_str(b.value()));
  }
  Matrix c = a.value().cwiseProduct(b.value());
  Var inputs[] = {a, b};
  return a.tape()->record(
      std::move(c), inputs, [a, b](Tape& t, const Matrix& g, const Matrix&) {
        if (t.requires_grad(a)) t.grad_slot(a) += g.cwiseProduct(t.value(b));
        if (t.requires_grad(b)) t.grad_slot(b) += g.cwiseProduct(t.value(a));
      });
}

Var sum_all(Var a) {
  Matrix c(1, 1);
  c(0, 0) = a.value().sum();
  Var inputs[] = {a};
  return a.tape()->record(std::move(c), inputs,
                          [a](Tape& t, const Matrix& g, const Matrix&) {
                            t.grad_slot(a).array() += g(0, 0);
                          });
}

Var row_select(Var x, std::span<const long> rows) {
  const Matrix& xv = x.value();
  Matrix out(static_cast<long>(rows.size()), xv.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= xv.rows()) {
      throw ShapeError("row_select: row " + std::to_string(rows[k]) +
                       " outside " + shape_str(xv));
    }
    out.row(static_cast<long>(k)) = xv.row(rows[k]);
  }
  std::vector<long> saved(rows.begin(), rows.end());
  Var inputs[] = {x};
  return x.tape()->record(
      std::move(out), inputs,
      [x, saved = std::move(saved)](Tape& t, const Matrix& g, const Matrix&) {
        Matrix& gx = t.grad_slot(x);
        for (std::size_t k = 0; k < saved.size(); ++k) {
          gx.row(saved[k]) += g.row(static_cast<long>(k));
        }
      });
}

Var weighted_combine(Var weights, std::span<const Var> values) {
  const Matrix& w = weights.value();
  if (values.empty() || w.cols() != static_cast<long>(values.size())) {
    throw ShapeError("weighted_combine: " + std::to_string(values.size()) +
                     " values for weight matrix " + shape_str(w));
  }
  const long rows = values[0].rows();
  const long cols = values[0].cols();
  if (w.rows() != rows) {
    throw ShapeError("weighted_combine: weights " + shape_str(w) + " vs values " +
                     shape_str(values[0].value()));
  }
  Matrix out = Matrix::Zero(rows, cols);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Matrix& v = values[k].value();
    if (v.rows() != rows || v.cols() != cols) {
      throw ShapeError("weighted_combine: value " + std::to_string(k) + " is " +
                       shape_str(v) + ", expected " + shape_str(values[0].value()));
    }
    out.array() += v.array().colwise() * w.col(static_cast<long>(k)).array();
  }
  std::vector<Var> inputs;
  inputs.push_back(weights);
  inputs.insert(inputs.end(), values.begin(), values.end());
  std::vector<Var> saved(values.begin(), values.end());
  return weights.tape()->record(
      std::move(out), inputs,
      [weights, saved](Tape& t, const Matrix& g, const Matrix&) {
        const Matrix& w = t.value(weights);
        const bool need_w = t.requires_grad(weights);
        for (std::size_t k = 0; k < saved.size(); ++k) {
          const long kk = static_cast<long>(k);
          const Matrix& v = t.value(saved[k]);
          if (t.requires_grad(saved[k])) {
            t.grad_slot(saved[k]).array() += g.array().colwise() * w.col(kk).array();
          }
          if (need_w) {
            t.grad_slot(weights).col(kk) += g.cwiseProduct(v).rowwise().sum();
          }
        }
      });
}

Var softmax_cross_entropy(Var logits, std::span<const long> rows,
                          std::span<const int> classes) {
  const Matrix& z = logits.value();
  if (rows.size() != classes.size()) {
    throw ShapeError("softmax_cross_entropy: rows/classes size mismatch");
  }
  double loss = 0.0;
  Matrix probs(static_cast<long>(rows.size()), z.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const long i = rows[k];
    const int c = classes[k];
    if (i < 0 || i >= z.rows()) {
      throw ShapeError("softmax_cross_entropy: row " + std::to_string(i) +
                       " outside " + shape_str(z));
    }
    if (c < 0 || c >= z.cols()) {
      throw DataError("class index " + std::to_string(c) + " outside [0, " +
                      std::to_string(z.cols()) + ")");
    }
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    loss += lse - z(i, c);
    probs.row(static_cast<long>(k)) = (z.row(i).array() - lse).exp().matrix();
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  std::vector<long> r(rows.begin(), rows.end());
  std::vector<int> cl(classes.begin(), classes.end());
  Var inputs[] = {logits};
  return logits.tape()->record(
      std::move(out), inputs,
      [logits, r = std::move(r), cl = std::move(cl), p = std::move(probs)](
          Tape& t, const Matrix& g, const Matrix&) {
        Matrix& gz = t.grad_slot(logits);
        const double s = g(0, 0);
        for (std::size_t k = 0; k < r.size(); ++k) {
          gz.row(r[k]) += s * p.row(static_cast<long>(k));
          gz(r[k], cl[k]) -= s;
        }
      });
}

void set_num_threads(int n) {
  if (n <= 0) return;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  Eigen::setNbThreads(n);
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hetconv
