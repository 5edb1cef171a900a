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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftdiag/record.hpp"

namespace shiftdiag {

/// Sample Pearson correlation, clamped to [-1, 1]. Pairs are summed in sorted
/// order, so the result does not depend on the order of the input.
/// Throws DataError for fewer than 2 points or zero variance.
double pearson(std::span<double const> xs, std::span<double const> ys);

/// 1-based ranks; tied values share their average rank.
std::vector<double> average_ranks(std::span<double const> values);

/// Pearson correlation of the average ranks.
double spearman(std::span<double const> xs, std::span<double const> ys);

struct SteigerResult
{
  double z;
  double p_value;  ///< two-sided, standard normal
};

/**
 * Steiger's Z for two dependent correlations sharing variable j: compares
 * r_jk against r_jh given r_kh, over n observations, through Fisher z with
 * the pooled-correlation covariance correction. Equal r_jk and r_jh give
 * exactly (0, 1). Otherwise the three must form a positive-definite
 * correlation matrix; |r| < 1 and n >= 4 always.
 */
SteigerResult steiger_test(double r_jk, double r_jh, double r_kh, std::size_t n);

/// A named group of records: every record (key empty) or those whose tag
/// `key` equals `value`.
struct Subset
{
  std::string name;
  std::string key;
  std::string value;
};

/// Parses "all,distribution=WD,group=pdtb" into subsets.
std::vector<Subset> parse_subsets(std::string_view spec);

struct CorrelationCell
{
  std::string                statistic;
  std::optional<double>      spearman;
  std::optional<double>      pearson;
  std::optional<std::string> error;
};

/// hdisc against another statistic, both correlated with the error gap.
struct SteigerComparison
{
  std::string                method;  ///< "pearson" or "spearman"
  std::string                other;
  std::optional<double>      z;
  std::optional<double>      p_value;
  std::optional<std::string> error;
};

struct SubsetCorrelations
{
  std::string                    name;
  std::size_t                    count;
  std::vector<CorrelationCell>   cells;  ///< frs, energy, mmd, bbsd, hdisc
  std::vector<SteigerComparison> steiger;
};

struct CorrelationTable
{
  std::vector<SubsetCorrelations> subsets;
};

/// Correlation of each statistic with the error gap per subset. Failed
/// records are ignored; degenerate cells carry an error instead of a value.
CorrelationTable correlate(std::span<ExperimentRecord const> records,
                           std::span<Subset const> subsets, bool with_steiger = true);

/// Statistic names in table order.
std::vector<std::string> const &statistic_names();

double statistic_value(ShiftStatistics const &stats, std::string_view name);

}  // namespace shiftdiag
