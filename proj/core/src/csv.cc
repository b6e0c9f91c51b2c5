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

#include "fairboost/csv.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "fairboost/error.h"

namespace fairboost {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto res = std::from_chars(begin, end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

bool ParseInt(const std::string& s, long long* out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string QuoteField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::string> ParseCsvRecord(std::istream& in, bool* ok) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  *ok = true;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  if (in_quotes) *ok = false;
  if (!any) return {};
  fields.push_back(std::move(field));
  return fields;
}

Dataset ReadCsv(std::istream& in, const Schema& schema, const CsvOptions& options) {
  bool ok = true;
  std::vector<std::string> header = ParseCsvRecord(in, &ok);
  if (header.empty() || !ok) throw Error(ErrorCode::kParse, "missing or malformed header row");
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0].erase(0, 3);
  }
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!col.emplace(header[i], i).second) {
      throw Error(ErrorCode::kSchema, "duplicate column '" + header[i] + "'");
    }
  }
  if (schema.IndexOf(options.group_column)) {
    throw Error(ErrorCode::kSchema,
                "group column '" + options.group_column + "' must not be a feature");
  }
  std::vector<std::size_t> feature_cols;
  for (const auto& f : schema.features()) {
    auto it = col.find(f.name);
    if (it == col.end()) throw Error(ErrorCode::kSchema, "missing column '" + f.name + "'");
    feature_cols.push_back(it->second);
  }
  auto label_it = col.find(options.label_column);
  if (label_it == col.end()) {
    throw Error(ErrorCode::kSchema, "missing column '" + options.label_column + "'");
  }
  std::optional<std::size_t> group_col;
  if (auto it = col.find(options.group_column); it != col.end()) {
    group_col = it->second;
  } else if (!options.default_group) {
    throw Error(ErrorCode::kSchema, "missing column '" + options.group_column + "'");
  }
  std::optional<std::size_t> weight_col;
  if (auto it = col.find(options.weight_column); it != col.end()) weight_col = it->second;
  std::optional<std::size_t> id_col;
  if (auto it = col.find(options.row_id_column); it != col.end()) id_col = it->second;

  std::vector<double> feats;
  std::vector<int> labels;
  std::vector<std::string> groups;
  std::vector<double> weights;
  std::vector<std::uint64_t> ids;
  std::size_t record = 0;
  while (in.peek() != EOF) {
    std::vector<std::string> fields = ParseCsvRecord(in, &ok);
    ++record;
    const std::string where = "row " + std::to_string(record);
    if (!ok) throw Error(ErrorCode::kParse, where + ": unterminated quoted field");
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParse, where + ": expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      double v;
      const std::string& cell = fields[feature_cols[f]];
      if (cell.empty()) {
        throw Error(ErrorCode::kParse, where + ": missing value for '" + schema.feature(f).name + "'");
      }
      if (!ParseDouble(cell, &v)) {
        throw Error(ErrorCode::kParse, where + ": non-numeric value '" + cell + "' for '" +
                                           schema.feature(f).name + "'");
      }
      feats.push_back(v);
    }
    const std::string& lab = fields[label_it->second];
    int label = -1;
    if (!options.class_names.empty()) {
      auto it = std::find(options.class_names.begin(), options.class_names.end(), lab);
      long long idx;
      if (it != options.class_names.end()) {
        label = static_cast<int>(it - options.class_names.begin());
      } else if (ParseInt(lab, &idx) && idx >= 0 &&
                 idx < static_cast<long long>(options.class_names.size())) {
        label = static_cast<int>(idx);
      } else {
        throw Error(ErrorCode::kLabel, where + ": unknown label value '" + lab + "'");
      }
    } else {
      long long idx;
      if (!ParseInt(lab, &idx) || idx < 0 || idx > 1'000'000) {
        throw Error(ErrorCode::kLabel, where + ": unknown label value '" + lab + "'");
      }
      label = static_cast<int>(idx);
    }
    labels.push_back(label);
    groups.push_back(group_col ? fields[*group_col] : *options.default_group);
    if (weight_col) {
      double w;
      if (!ParseDouble(fields[*weight_col], &w)) {
        throw Error(ErrorCode::kParse, where + ": non-numeric weight '" + fields[*weight_col] + "'");
      }
      weights.push_back(w);
    } else {
      weights.push_back(1.0);
    }
    if (id_col) {
      long long id;
      if (!ParseInt(fields[*id_col], &id) || id < 0) {
        throw Error(ErrorCode::kParse, where + ": invalid row id '" + fields[*id_col] + "'");
      }
      ids.push_back(static_cast<std::uint64_t>(id));
    }
  }

  int k = 0;
  if (!options.class_names.empty()) {
    k = static_cast<int>(options.class_names.size());
  } else if (!labels.empty()) {
    k = *std::max_element(labels.begin(), labels.end()) + 1;
  }
  if (options.n_classes) {
    if (*options.n_classes < k) {
      throw Error(ErrorCode::kLabel, "label index exceeds declared number of classes");
    }
    k = *options.n_classes;
  }
  k = std::max(k, 2);
  return Dataset(schema, k, std::move(feats), std::move(labels), std::move(groups),
                 std::move(weights), std::move(ids), options.class_names);
}

Dataset LoadCsv(const std::filesystem::path& path, const Schema& schema,
                const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return ReadCsv(in, schema, options);
}

void WriteCsv(std::ostream& out, const Dataset& data, const CsvOptions& options) {
  out << QuoteField(options.row_id_column);
  for (const auto& f : data.schema().features()) out << ',' << QuoteField(f.name);
  out << ',' << QuoteField(options.label_column) << ',' << QuoteField(options.group_column) << ','
      << QuoteField(options.weight_column) << '\n';
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    out << data.row_id(i);
    for (double v : data.row(i)) out << ',' << FormatDouble(v);
    out << ',' << data.label(i) << ',' << QuoteField(data.group(i)) << ','
        << FormatDouble(data.weight(i)) << '\n';
  }
}

void SaveCsv(const std::filesystem::path& path, const Dataset& data, const CsvOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  WriteCsv(out, data, options);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace fairboost
