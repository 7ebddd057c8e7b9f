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

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hetconv/rng.hpp"

namespace hetconv {

// Dense row-major block of 64-bit floats.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

std::string shape_str(const Matrix& m);

bool all_finite(const Matrix& m);

// Dense text format: header line "rows cols", then one whitespace-separated
// row per line. Non-finite values are rejected on read.
Matrix read_dense(std::istream& in, const std::string& origin = "<stream>");
Matrix read_dense_file(const std::filesystem::path& path);
void write_dense(std::ostream& out, const Matrix& m);

// Glorot/Xavier uniform: i.i.d. U[-b, b] with b = sqrt(6 / (rows + cols)).
Matrix xavier_uniform(long rows, long cols, Rng& rng);

}  // namespace hetconv
