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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shiftdiag/classifier.hpp"
#include "shiftdiag/dataset.hpp"
#include "shiftdiag/record.hpp"

namespace shiftdiag {

/// A named CSV dataset and the tags its records inherit.
struct DatasetEntry
{
  std::string                        name;
  std::filesystem::path              path;
  std::map<std::string, std::string> tags;
};

/**
 * One declared (S, T) pair.
 *
 * single_source: S is the first half of `source`, T the second half of
 * `target` (the same dataset unless given). multi_source: T is the first
 * half of `domains[held_out]`, S the first halves of the rest. synthetic:
 * `scenario` at `n` rows per side.
 */
struct PairEntry
{
  std::string                        id;
  Setup                              setup{Setup::single_source};
  std::string                        source;
  std::string                        target;
  std::vector<std::string>           domains;
  std::size_t                        held_out{0};
  ScenarioKind                       scenario{ScenarioKind::A};
  std::size_t                        n{400};
  std::map<std::string, std::string> tags;
};

struct Manifest
{
  std::vector<DatasetEntry>  datasets;
  std::vector<PairEntry>     pairs;
  std::vector<ModelKind>     classifiers;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path      records_path;  ///< final report, empty for none
  std::filesystem::path      log_path;      ///< incremental JSONL sink, empty for none
  TrainConfig                train;
  unsigned                   threads{1};
  std::uint64_t              hash{0};  ///< of the manifest text

  std::size_t record_count() const { return pairs.size() * classifiers.size() * seeds.size(); }
};

/// Parses a JSON manifest. Relative paths resolve against `base_dir`.
/// Throws ConfigError on schema violations and unknown dataset names.
Manifest parse_manifest(std::string const &text, std::filesystem::path const &base_dir = {});
Manifest load_manifest(std::filesystem::path const &path);

/// hash(seed, pair id, kind): the training seed of one record.
std::uint64_t composite_seed(std::uint64_t seed, std::string_view pair_id, ModelKind kind);

/// Trains h on the pair's source and fills every statistic of the record.
ExperimentRecord run_pair(SplitPair const &pair, ModelKind kind, std::uint64_t seed,
                          TrainConfig const &cfg);

struct SweepResult
{
  std::vector<ExperimentRecord> records;  ///< sorted by id
  std::size_t                   failures{0};
};

/**
 * Runs every (pair, kind, seed) of the manifest on a worker pool. Records
 * are appended to the log as they finish; a failing record carries its
 * error message and the sweep goes on.
 */
SweepResult run_experiments(Manifest const &manifest);

}  // namespace shiftdiag
