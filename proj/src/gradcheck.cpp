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

#include "hetconv/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hetconv/error.hpp"

namespace hetconv {
namespace {

double evaluate(const ScalarFn& f, std::span<const Matrix> params) {
  Tape tape;
  std::vector<Var> vars;
  for (const auto& p : params) vars.push_back(tape.constant_ref(p));
  Var out = f(tape, vars);
  if (out.rows() != 1 || out.cols() != 1) {
    throw ShapeError("gradcheck: f must return 1x1, got " + shape_str(out.value()));
  }
  const double v = out.value()(0, 0);
  if (!std::isfinite(v)) throw NumericalError("gradcheck: f is not finite");
  return v;
}

}  // namespace

GradcheckReport gradcheck(const ScalarFn& f, std::span<const Matrix> params,
                          double h, double tol, std::span<const std::string> names,
                          double floor) {
  if (!(h > 0.0)) throw ConfigError("gradcheck: step h must be positive");

  std::vector<Matrix> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& p : params) vars.push_back(tape.parameter(p));
    Var out = f(tape, vars);
    if (out.rows() != 1 || out.cols() != 1) {
      throw ShapeError("gradcheck: f must return 1x1, got " + shape_str(out.value()));
    }
    if (!std::isfinite(out.value()(0, 0))) {
      throw NumericalError("gradcheck: f is not finite");
    }
    tape.backward(out);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Matrix& g = vars[k].grad();
      analytic.push_back(g.size() ? g : Matrix::Zero(params[k].rows(), params[k].cols()));
    }
  }

  GradcheckReport report;
  report.tolerance = tol;
  std::vector<Matrix> work(params.begin(), params.end());
  for (std::size_t k = 0; k < work.size(); ++k) {
    GradcheckEntry entry;
    entry.name = k < names.size() ? names[k] : "param" + std::to_string(k);
    Matrix& p = work[k];
    Matrix numeric(p.rows(), p.cols());
    for (long i = 0; i < p.rows(); ++i) {
      for (long j = 0; j < p.cols(); ++j) {
        const double orig = p(i, j);
        p(i, j) = orig + h;
        const double up = evaluate(f, work);
        p(i, j) = orig - h;
        const double down = evaluate(f, work);
        p(i, j) = orig;
        numeric(i, j) = (up - down) / (2.0 * h);
      }
    }
    if (p.size() > 0) {
      const double scale = std::max({analytic[k].cwiseAbs().maxCoeff(),
                                     numeric.cwiseAbs().maxCoeff(), floor});
      entry.max_abs_error = (analytic[k] - numeric).cwiseAbs().maxCoeff();
      entry.max_rel_error = entry.max_abs_error / scale;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.params.push_back(std::move(entry));
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

}  // namespace hetconv
