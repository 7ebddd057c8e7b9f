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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetconv/matrix.hpp"

namespace hetconv {

// A directed relation <src, dst>. Its adjacency matrix has one row per dst
// object and one column per src object, so messages flow src -> dst.
struct Relation {
  std::string src;
  std::string dst;

  bool operator==(const Relation&) const = default;
  std::string name() const { return src + "->" + dst; }
};

// Network schema: object types plus directed relations over them. Declaration
// order is canonical and drives every iteration order in the library.
class Schema {
 public:
  Schema() = default;
  // Throws ConfigError if the declaration violates the schema invariants.
  Schema(std::vector<std::string> types, std::vector<Relation> relations);

  const std::vector<std::string>& types() const { return types_; }
  const std::vector<Relation>& relations() const { return relations_; }

  std::size_t num_types() const { return types_.size(); }
  bool has_type(const std::string& t) const;
  std::size_t type_index(const std::string& t) const;
  std::optional<std::size_t> relation_index(const std::string& src,
                                            const std::string& dst) const;

  // Types Gamma with <Gamma, omega> declared, in relation declaration order.
  std::vector<std::string> neighbor_types(const std::string& omega) const;
  // Relation indices feeding omega, aligned with neighbor_types(omega).
  std::vector<std::size_t> incoming_relations(const std::string& omega) const;

  // Stable 64-bit FNV-1a digest of the canonical schema text.
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  std::vector<std::string> types_;
  std::vector<Relation> relations_;
};

std::vector<std::string> neighbor_types(const Schema& s,
                                        const std::string& omega);

// DBLP-like schema: P, A, C, T with P<->C, P<->A, P<->T.
Schema dblp_schema();

struct Triplet {
  long row;
  long col;
  double weight;
};

// Compressed sparse row adjacency, n_rows target objects x n_cols source
// objects. Column indices are strictly increasing within a row and stored
// weights are positive.
class SparseAdj {
 public:
  SparseAdj() = default;
  SparseAdj(long n_rows, long n_cols);
  // Raw CSR arrays; validated, throws DataError on any broken invariant.
  SparseAdj(long n_rows, long n_cols, std::vector<long> row_ptr,
            std::vector<long> col_idx, std::vector<double> values);

  // Duplicate (row, col) entries are merged by summing their weights.
  static SparseAdj from_triplets(long n_rows, long n_cols,
                                 std::vector<Triplet> triplets);
  static SparseAdj from_dense(const Matrix& dense);

  long rows() const { return n_rows_; }
  long cols() const { return n_cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const long> row_ptr() const { return row_ptr_; }
  std::span<const long> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const long> row_cols(long i) const {
    return std::span<const long>(col_idx_).subspan(
        row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const double> row_values(long i) const {
    return std::span<const double>(values_).subspan(
        row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  double row_sum(long i) const;

  SparseAdj transpose() const;
  Matrix to_dense() const;
  bool same_pattern(const SparseAdj& other) const;

  // Describes the first broken CSR invariant, if any.
  std::optional<std::string> check() const;

 private:
  long n_rows_ = 0;
  long n_cols_ = 0;
  std::vector<long> row_ptr_{0};
  std::vector<long> col_idx_;
  std::vector<double> values_;
};

// D^-1 A. Rows without entries stay empty.
SparseAdj row_normalize(const SparseAdj& a);

// True when every non-empty row sums to 1 within tol.
bool is_row_normalized(const SparseAdj& a, double tol = 1e-6);

struct Split {
  std::vector<long> train;
  std::vector<long> val;
  std::vector<long> test;
};

// A typed graph. Vectors are aligned with the schema: adjacency[r] belongs to
// schema.relations()[r] and features[t] to schema.types()[t]. Labels use -1
// for unlabeled objects. The struct is a plain value; validate_graph reports
// any broken invariant.
struct HinGraph {
  Schema schema;
  std::vector<SparseAdj> adjacency;
  std::vector<Matrix> features;
  std::map<std::string, std::vector<int>> labels;
  std::map<std::string, int> class_counts;
  std::map<std::string, Split> splits;

  long num_objects(const std::string& type) const;
  long total_objects() const;
  // Undirected links: each relation pair declared in both directions counts
  // once, a one-directional relation counts its own entries.
  long total_links() const;

  const SparseAdj& adj(const std::string& src, const std::string& dst) const;
  const Matrix& feature(const std::string& type) const;
};

std::vector<std::string> validate_graph(const HinGraph& g);

// Row-normalized copies of every adjacency, aligned with schema relations.
std::vector<SparseAdj> normalized_adjacency(const HinGraph& g);

}  // namespace hetconv
