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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hetconv/autodiff.hpp"

namespace hetconv {

struct GradcheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> params;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Builds a scalar (1x1) output from parameter leaves on a fresh tape.
using ScalarFn = std::function<Var(Tape&, std::span<const Var> params)>;

// Compares the tape gradient against central differences
// (f(p + h) - f(p - h)) / 2h for every entry of every parameter. The relative
// error of a parameter is its largest entry-wise |analytic - numeric| divided
// by the parameter's gradient scale max(max|analytic|, max|numeric|, floor),
// so entries with near-zero gradient are judged against the tensor they
// belong to rather than against difference noise.
// Throws NumericalError if f is not finite.
GradcheckReport gradcheck(const ScalarFn& f, std::span<const Matrix> params,
                          double h, double tol,
                          std::span<const std::string> names = {},
                          double floor = 1e-6);

}  // namespace hetconv
