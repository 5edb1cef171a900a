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
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace shiftdiag {

/// Row-major n x d feature matrix; one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/**
 * Feature vectors with integer class labels.
 *
 * Construction validates every invariant: n >= 1, d >= 1, all values finite,
 * labels in [0, num_classes) and num_classes >= 2. Instances are immutable.
 */
class LabeledDataset
{
public:
  LabeledDataset(Matrix features, std::vector<int> labels, int num_classes,
                 std::string domain_tag = {});

  Matrix const &          features() const { return features_; }
  std::vector<int> const &labels() const { return labels_; }
  int                     num_classes() const { return num_classes_; }
  std::string const &     domain_tag() const { return domain_tag_; }

  std::size_t size() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }

  /// Rows selected by index, in the given order.
  LabeledDataset subset(std::span<std::size_t const> rows) const;

  /// Same rows with a different tag.
  LabeledDataset with_tag(std::string tag) const;

private:
  Matrix           features_;
  std::vector<int> labels_;
  int              num_classes_;
  std::string      domain_tag_;
};

enum class Setup
{
  single_source,
  multi_source,
  synthetic
};

std::string to_string(Setup setup);

/// One (S, T) experiment pair.
struct SplitPair
{
  LabeledDataset source;
  LabeledDataset target;
  std::uint64_t  seed;
  Setup          setup;
};

// CSV I/O -------------------------------------------------------------------
//
// Header `f0,...,f{d-1},label`, optionally preceded by `# num_classes=K`.
// Unlabeled files omit the label column.

LabeledDataset load_dataset(std::filesystem::path const &path);

/// Features of a labeled or unlabeled file.
Matrix load_features(std::filesystem::path const &path);

void save_dataset(LabeledDataset const &ds, std::filesystem::path const &path);
void save_features(Matrix const &features, std::filesystem::path const &path);

// Splits ------------------------------------------------------------------

/// Seeded shuffle, then split at floor(n/2); the smaller half comes first.
std::pair<LabeledDataset, LabeledDataset> split_half(LabeledDataset const &ds, std::uint64_t seed);

/// Row-wise concatenation. Dimensions and class counts must match.
LabeledDataset concatenate(std::span<LabeledDataset const> parts, std::string tag = {});

/**
 * Multi-source pair: the target is the first half of `domains[held_out]`, the
 * source concatenates the first halves of every other domain. Halves come
 * from split_half with `seed`.
 */
SplitPair make_multisource(std::span<LabeledDataset const> domains, std::size_t held_out,
                           std::uint64_t seed);

// Synthetic shift regimes -------------------------------------------------

enum class ScenarioKind
{
  A,  ///< feature shift along the boundary, labeling unchanged
  B,  ///< no feature shift, labels flipped
  C   ///< feature shift that carries points across the boundary
};

ScenarioKind parse_scenario_kind(std::string_view name);
std::string  to_string(ScenarioKind kind);

/// Two-class, two-dimensional scenario with n source and n target rows.
SplitPair synth_scenario(ScenarioKind kind, std::size_t n, std::uint64_t seed);

}  // namespace shiftdiag
