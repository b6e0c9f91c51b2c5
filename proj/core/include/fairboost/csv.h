// Copyright 2026 The fairboost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairboost/tabular.h"

namespace fairboost {

struct CsvOptions {
  std::string label_column = "label";
  std::string group_column = "group";
  // Used for every row when the group column is absent.
  std::optional<std::string> default_group;
  // Optional columns; read when present in the header.
  std::string weight_column = "weight";
  std::string row_id_column = "row_id";
  // When set, label cells may be these names (or their indices) and K is
  // the number of names. Otherwise labels are integer indices and K is
  // inferred as max label + 1.
  std::vector<std::string> class_names;
  std::optional<int> n_classes;
};

// RFC-4180 style reader: header required, comma separated, double quotes
// for quoting, '.' decimal separator. Empty cells are rejected.
Dataset ReadCsv(std::istream& in, const Schema& schema, const CsvOptions& options = {});
Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema,
                const CsvOptions& options = {});

// Writes row_id, features, label index, group and weight columns. Values use
// the shortest representation that round-trips exactly.
void WriteCsv(std::ostream& out, const Dataset& data, const CsvOptions& options = {});
void SaveCsv(const std::filesystem::path& path, const Dataset& data,
             const CsvOptions& options = {});

// Splits one CSV record into fields; exposed for tests.
std::vector<std::string> ParseCsvRecord(std::istream& in, bool* ok);

}  // namespace fairboost
