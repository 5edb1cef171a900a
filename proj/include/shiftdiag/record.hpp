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
#include <map>
#include <optional>
#include <string>

namespace shiftdiag {

/// The five shift statistics of one (S, T, h) triple.
struct ShiftStatistics
{
  double frs{0.0};
  double energy{0.0};
  double mmd{0.0};
  double bbsd{0.0};
  double hdisc{0.0};
};

/// Result of one experiment: classifier h trained on `source`, evaluated on `target`.
struct ExperimentRecord
{
  std::string     id;
  std::string     source;
  std::string     target;
  std::string     kind;
  std::uint64_t   seed{0};
  ShiftStatistics stats;
  double          train_error{0.0};
  double          target_error{0.0};
  double          error_gap{0.0};
  double          adaptability_upper{0.0};

  /// Categorical metadata: group, encoding, news, distribution (WD/OOD), setup.
  std::map<std::string, std::string> tags;

  /// Set when the experiment failed; the numeric fields are then meaningless.
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

}  // namespace shiftdiag
