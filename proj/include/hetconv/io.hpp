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
#include <string>

#include "hetconv/hin.hpp"

namespace hetconv {

// Writes via a sibling temp file and rename, so readers never observe a
// partially written artifact.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
std::string read_file(const std::filesystem::path& path);

std::string dense_to_string(const Matrix& m);

// Directory layout:
//   schema.json                 {"types": [...], "relations": [[src, dst], ...]}
//                               optional "classes": {"TYPE": count}
//   edges_<SRC>_<DST>.tsv       src_index <TAB> dst_index [<TAB> weight]
//   features_<TYPE>.tsv         dense text matrix
//   labels_<TYPE>.tsv           object_index <TAB> class_index
//   split_<TYPE>.json           {"train": [...], "val": [...], "test": [...]}
// A relation whose edge file is absent is derived by transposing its reverse
// relation when that file exists.
HinGraph load_hin(const std::filesystem::path& dir);
void save_hin(const std::filesystem::path& dir, const HinGraph& g);

Schema parse_schema_json(const std::string& text);
std::string schema_to_json(const Schema& s);

std::string split_to_json(const Split& s);
Split parse_split_json(const std::string& text, const std::string& origin);

}  // namespace hetconv
