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
#include <string>
#include <vector>

#include "shiftdiag/classifier.hpp"
#include "shiftdiag/dataset.hpp"

namespace shiftdiag {

enum class StatisticName
{
  frs,
  energy,
  mmd,
  bbsd
};

std::string to_string(StatisticName name);

struct StatisticValue
{
  StatisticName name;
  double        value;
  double        bandwidth{0.0};   ///< mmd / bbsd: kernel sigma
  std::size_t   graph_size{0};    ///< frs: pooled vertex count
  std::size_t   same_sample{0};   ///< frs: same-sample MST edges (R)
};

struct Edge
{
  std::size_t u;  ///< u < v
  std::size_t v;
  double      weight;
};

/// Euclidean distance between two rows of equal length.
double euclidean(std::span<double const> a, std::span<double const> b);

/**
 * Minimum spanning tree of the complete Euclidean graph on the rows of
 * `points` (dense Prim, O(N^2)). Equal weights are ordered by the index pair
 * (u, v), which makes the tree unique.
 */
std::vector<Edge> minimum_spanning_tree(Matrix const &points);

/// Friedman-Rafsky count of same-sample MST edges, normalized by n + m - 2.
StatisticValue frs_statistic(Matrix const &sx, Matrix const &tx);

/// Energy distance with plain (biased) within-sample means.
StatisticValue energy_statistic(Matrix const &sx, Matrix const &tx);

/// Row indices (sorted) of the seeded subsample used by median_bandwidth:
/// all rows when count <= 100, otherwise a uniform draw of exactly 100.
std::vector<std::size_t> median_subsample(std::size_t count, std::uint64_t seed);

/// Median pairwise distance over median_subsample. Falls back to the smallest
/// positive distance when the median is 0, and to 1 when every point coincides.
double median_bandwidth(Matrix const &pooled, std::uint64_t seed);

/// Unbiased-within-sample MMD with a Gaussian RBF kernel of width sigma.
StatisticValue mmd_statistic(Matrix const &sx, Matrix const &tx, double sigma);

/// MMD on the softmax outputs of h, with a median bandwidth of the pooled scores.
StatisticValue bbsd_statistic(Classifier const &h, Matrix const &sx, Matrix const &tx,
                              std::uint64_t seed = 0);

/// Vertical stack of two feature matrices.
Matrix pool(Matrix const &a, Matrix const &b);

}  // namespace shiftdiag
