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

#include <filesystem>

#include "hetconv/model.hpp"

namespace hetconv {

// Directory of dense TSVs named L<layer>_<block>_<param>.tsv plus model.json
// (schema, schema hash, dims, d_a, mean-variant flag, parameter names).
void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& dir);

}  // namespace hetconv
