#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The shiftdiag Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftdiag/correlation.hpp"
#include "shiftdiag/record.hpp"
#include "shiftdiag/regression.hpp"

namespace shiftdiag {

using Json = nlohmann::ordered_json;

inline constexpr char const *kToolVersion = "shiftdiag 0.1.0";

/// 16 lowercase hex digits.
std::string hex_hash(std::uint64_t hash);

Json             to_json(ExperimentRecord const &record);
ExperimentRecord record_from_json(Json const &j);

struct RecordsReport
{
  std::string                   version;
  std::string                   manifest_hash;
  std::vector<ExperimentRecord> records;
};

Json          records_report(std::span<ExperimentRecord const> records, std::uint64_t manifest_hash);
RecordsReport parse_records_report(Json const &j);
RecordsReport load_records(std::filesystem::path const &path);

Json to_json(CorrelationTable const &table);
Json to_json(OlsFit const &fit);
Json to_json(Diagnostics const &diag);

Diagnostics diagnostics_from_json(Json const &j);
DesignSpec  design_spec_from_json(Json const &j);

/// Two-space indented text with a trailing newline.
std::string dump(Json const &j);

/// Writes atomically enough for reports: a temporary file renamed into place.
/// Throws Error if the path is unwritable.
void write_json(std::filesystem::path const &path, Json const &j);

Json read_json(std::filesystem::path const &path);

}  // namespace shiftdiag
