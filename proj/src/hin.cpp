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

#include "hetconv/hin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "hetconv/error.hpp"

namespace hetconv {

Schema::Schema(std::vector<std::string> types, std::vector<Relation> relations)
    : types_(std::move(types)), relations_(std::move(relations)) {
  if (types_.size() + relations_.size() <= 2) {
    throw ConfigError("schema needs |types| + |relations| > 2, got " +
                      std::to_string(types_.size()) + " + " +
                      std::to_string(relations_.size()));
  }
  std::set<std::string> seen;
  for (const auto& t : types_) {
    if (t.empty()) throw ConfigError("schema: empty type name");
    if (!seen.insert(t).second) {
      throw ConfigError("schema: duplicate type '" + t + "'");
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : relations_) {
    for (const auto* end : {&r.src, &r.dst}) {
      if (!seen.count(*end)) {
        throw ConfigError("schema: relation " + r.name() +
                          " names undeclared type '" + *end + "'");
      }
    }
    if (!pairs.insert({r.src, r.dst}).second) {
      throw ConfigError("schema: duplicate relation " + r.name());
    }
  }
}

bool Schema::has_type(const std::string& t) const {
  return std::find(types_.begin(), types_.end(), t) != types_.end();
}

std::size_t Schema::type_index(const std::string& t) const {
  auto it = std::find(types_.begin(), types_.end(), t);
  if (it == types_.end()) throw ConfigError("unknown object type '" + t + "'");
  return static_cast<std::size_t>(it - types_.begin());
}

std::optional<std::size_t> Schema::relation_index(const std::string& src,
                                                  const std::string& dst) const {
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    if (relations_[r].src == src && relations_[r].dst == dst) return r;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::neighbor_types(const std::string& omega) const {
  type_index(omega);
  std::vector<std::string> out;
  for (const auto& r : relations_) {
    if (r.dst == omega) out.push_back(r.src);
  }
  return out;
}

std::vector<std::size_t> Schema::incoming_relations(
    const std::string& omega) const {
  type_index(omega);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    if (relations_[r].dst == omega) out.push_back(r);
  }
  return out;
}

std::uint64_t Schema::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0xff;
    h *= 0x100000001b3ull;
  };
  mix("types");
  for (const auto& t : types_) mix(t);
  mix("relations");
  for (const auto& r : relations_) {
    mix(r.src);
    mix(r.dst);
  }
  return h;
}

std::string Schema::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash()));
  return buf;
}

std::vector<std::string> neighbor_types(const Schema& s,
                                        const std::string& omega) {
  return s.neighbor_types(omega);
}

Schema dblp_schema() {
  return Schema({"P", "A", "C", "T"}, {{"C", "P"},
                                       {"A", "P"},
                                       {"T", "P"},
                                       {"P", "C"},
                                       {"P", "A"},
                                       {"P", "T"}});
}

SparseAdj::SparseAdj(long n_rows, long n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {
  if (n_rows < 0 || n_cols < 0) throw DataError("SparseAdj: negative shape");
}

SparseAdj::SparseAdj(long n_rows, long n_cols, std::vector<long> row_ptr,
                     std::vector<long> col_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (auto err = check()) throw DataError("SparseAdj: " + *err);
}

std::optional<std::string> SparseAdj::check() const {
  if (n_rows_ < 0 || n_cols_ < 0) return "negative shape";
  if (row_ptr_.size() != static_cast<std::size_t>(n_rows_) + 1) {
    return "row_ptr has " + std::to_string(row_ptr_.size()) +
           " entries, expected " + std::to_string(n_rows_ + 1);
  }
  if (row_ptr_.front() != 0) return "row_ptr[0] != 0";
  if (col_idx_.size() != values_.size()) return "col_idx/values size mismatch";
  if (static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size()) {
    return "row_ptr[last] != nnz";
  }
  for (long i = 0; i < n_rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) {
      return "row_ptr decreases at row " + std::to_string(i);
    }
    for (long k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= n_cols_) {
        return "column index " + std::to_string(col_idx_[k]) +
               " out of range [0, " + std::to_string(n_cols_) + ") in row " +
               std::to_string(i);
      }
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        return "column indices not strictly increasing in row " +
               std::to_string(i);
      }
      if (!(values_[k] > 0.0) || !std::isfinite(values_[k])) {
        return "non-positive or non-finite weight in row " + std::to_string(i);
      }
    }
  }
  return std::nullopt;
}

SparseAdj SparseAdj::from_triplets(long n_rows, long n_cols,
                                   std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<long> row_ptr(n_rows + 1, 0);
  std::vector<long> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      throw DataError("edge (" + std::to_string(t.row) + ", " +
                      std::to_string(t.col) + ") outside " +
                      std::to_string(n_rows) + "x" + std::to_string(n_cols));
    }
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      vals.back() += t.weight;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.weight);
    ++row_ptr[t.row + 1];
  }
  for (long i = 0; i < n_rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseAdj(n_rows, n_cols, std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

SparseAdj SparseAdj::from_dense(const Matrix& dense) {
  std::vector<Triplet> t;
  for (long i = 0; i < dense.rows(); ++i) {
    for (long j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) t.push_back({i, j, dense(i, j)});
    }
  }
  return from_triplets(dense.rows(), dense.cols(), std::move(t));
}

double SparseAdj::row_sum(long i) const {
  double s = 0.0;
  for (double v : row_values(i)) s += v;
  return s;
}

SparseAdj SparseAdj::transpose() const {
  std::vector<long> row_ptr(n_cols_ + 1, 0);
  for (long c : col_idx_) ++row_ptr[c + 1];
  for (long j = 0; j < n_cols_; ++j) row_ptr[j + 1] += row_ptr[j];
  std::vector<long> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<long> cols(nnz());
  std::vector<double> vals(nnz());
  for (long i = 0; i < n_rows_; ++i) {
    for (long k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      long dst = next[col_idx_[k]]++;
      cols[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return SparseAdj(n_cols_, n_rows_, std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

Matrix SparseAdj::to_dense() const {
  Matrix m = Matrix::Zero(n_rows_, n_cols_);
  for (long i = 0; i < n_rows_; ++i) {
    for (long k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m(i, col_idx_[k]) = values_[k];
    }
  }
  return m;
}

bool SparseAdj::same_pattern(const SparseAdj& other) const {
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ &&
         row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

SparseAdj row_normalize(const SparseAdj& a) {
  std::vector<long> row_ptr(a.row_ptr().begin(), a.row_ptr().end());
  std::vector<long> cols(a.col_idx().begin(), a.col_idx().end());
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (long i = 0; i < a.rows(); ++i) {
    double s = a.row_sum(i);
    if (s <= 0.0) continue;
    for (long k = row_ptr[i]; k < row_ptr[i + 1]; ++k) vals[k] /= s;
  }
  return SparseAdj(a.rows(), a.cols(), std::move(row_ptr), std::move(cols),
                   std::move(vals));
}

bool is_row_normalized(const SparseAdj& a, double tol) {
  for (long i = 0; i < a.rows(); ++i) {
    if (a.row_cols(i).empty()) continue;
    if (std::abs(a.row_sum(i) - 1.0) > tol) return false;
  }
  return true;
}

long HinGraph::num_objects(const std::string& type) const {
  return features.at(schema.type_index(type)).rows();
}

long HinGraph::total_objects() const {
  long n = 0;
  for (const auto& f : features) n += f.rows();
  return n;
}

long HinGraph::total_links() const {
  long n = 0;
  const auto& rels = schema.relations();
  for (std::size_t r = 0; r < rels.size(); ++r) {
    auto rev = schema.relation_index(rels[r].dst, rels[r].src);
    // Count a two-way pair once, on its first-declared direction.
    if (rev && *rev < r) continue;
    n += static_cast<long>(adjacency[r].nnz());
  }
  return n;
}

const SparseAdj& HinGraph::adj(const std::string& src,
                               const std::string& dst) const {
  auto r = schema.relation_index(src, dst);
  if (!r) throw ConfigError("no relation " + src + "->" + dst);
  return adjacency.at(*r);
}

const Matrix& HinGraph::feature(const std::string& type) const {
  return features.at(schema.type_index(type));
}

std::vector<std::string> validate_graph(const HinGraph& g) {
  std::vector<std::string> out;
  const auto& types = g.schema.types();
  const auto& rels = g.schema.relations();
  if (g.features.size() != types.size()) {
    out.push_back("features: expected " + std::to_string(types.size()) +
                  " matrices, got " + std::to_string(g.features.size()));
    return out;
  }
  if (g.adjacency.size() != rels.size()) {
    out.push_back("adjacency: expected " + std::to_string(rels.size()) +
                  " matrices, got " + std::to_string(g.adjacency.size()));
    return out;
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    if (!g.features[t].allFinite()) {
      out.push_back("features[" + types[t] + "]: non-finite values");
    }
    if (g.features[t].cols() < 1) {
      out.push_back("features[" + types[t] + "]: zero feature columns");
    }
  }
  for (std::size_t r = 0; r < rels.size(); ++r) {
    const auto& rel = rels[r];
    const auto& a = g.adjacency[r];
    long want_rows = g.features[g.schema.type_index(rel.dst)].rows();
    long want_cols = g.features[g.schema.type_index(rel.src)].rows();
    if (a.rows() != want_rows || a.cols() != want_cols) {
      out.push_back("adjacency[" + rel.name() + "]: shape " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    ", expected " + std::to_string(want_rows) + "x" +
                    std::to_string(want_cols));
      continue;
    }
    if (auto err = a.check()) {
      out.push_back("adjacency[" + rel.name() + "]: " + *err);
      continue;
    }
    auto rev = g.schema.relation_index(rel.dst, rel.src);
    if (rev && *rev > r) {
      const auto& b = g.adjacency[*rev];
      if (b.rows() == a.cols() && b.cols() == a.rows() &&
          !a.transpose().same_pattern(b)) {
        out.push_back("adjacency[" + rel.name() + "] and adjacency[" +
                      rels[*rev].name() + "]: sparsity patterns are not transposes");
      }
    }
  }
  for (const auto& [type, labels] : g.labels) {
    if (!g.schema.has_type(type)) {
      out.push_back("labels: unknown type '" + type + "'");
      continue;
    }
    long n = g.num_objects(type);
    if (static_cast<long>(labels.size()) != n) {
      out.push_back("labels[" + type + "]: " + std::to_string(labels.size()) +
                    " entries for " + std::to_string(n) + " objects");
    }
    auto cc = g.class_counts.find(type);
    if (cc == g.class_counts.end() || cc->second < 1) {
      out.push_back("labels[" + type + "]: missing class count");
      continue;
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < -1 || labels[i] >= cc->second) {
        out.push_back("labels[" + type + "]: object " + std::to_string(i) +
                      " has class " + std::to_string(labels[i]) +
                      " outside [0, " + std::to_string(cc->second) + ")");
        break;
      }
    }
  }
  for (const auto& [type, split] : g.splits) {
    if (!g.schema.has_type(type)) {
      out.push_back("splits: unknown type '" + type + "'");
      continue;
    }
    long n = g.num_objects(type);
    std::set<long> seen;
    auto lab = g.labels.find(type);
    for (const auto* part : {&split.train, &split.val, &split.test}) {
      for (long i : *part) {
        if (i < 0 || i >= n) {
          out.push_back("splits[" + type + "]: index " + std::to_string(i) +
                        " out of range");
          continue;
        }
        if (!seen.insert(i).second) {
          out.push_back("splits[" + type + "]: index " + std::to_string(i) +
                        " appears in more than one split");
        }
        if (lab == g.labels.end() || lab->second.size() <= std::size_t(i) ||
            lab->second[i] < 0) {
          out.push_back("splits[" + type + "]: object " + std::to_string(i) +
                        " is unlabeled");
        }
      }
    }
  }
  return out;
}

std::vector<SparseAdj> normalized_adjacency(const HinGraph& g) {
  std::vector<SparseAdj> out;
  out.reserve(g.adjacency.size());
  for (const auto& a : g.adjacency) out.push_back(row_normalize(a));
  return out;
}

}  // namespace hetconv
