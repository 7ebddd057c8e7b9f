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

#include "hetconv/matrix.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hetconv/error.hpp"

namespace hetconv {

std::string shape_str(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix read_dense(std::istream& in, const std::string& origin) {
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw DataError(origin + ": missing or malformed 'rows cols' header");
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) {
        throw DataError(origin + ": expected " + std::to_string(rows * cols) +
                        " values, got " + std::to_string(i * cols + j));
      }
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw DataError(origin + ": not a number '" + tok + "' at row " +
                        std::to_string(i));
      }
      if (!std::isfinite(v)) {
        throw DataError(origin + ": non-finite value at row " +
                        std::to_string(i) + ", col " + std::to_string(j));
      }
      m(i, j) = v;
    }
  }
  std::string extra;
  if (in >> extra) {
    throw DataError(origin + ": trailing data after " + std::to_string(rows) +
                    " rows");
  }
  return m;
}

Matrix read_dense_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_dense(in, path.string());
}

void write_dense(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

Matrix xavier_uniform(long rows, long cols, Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw ShapeError("xavier_uniform: shape must be positive, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  }
  return m;
}

}  // namespace hetconv
