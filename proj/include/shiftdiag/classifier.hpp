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

#include "shiftdiag/dataset.hpp"

namespace shiftdiag {

class Rng;

enum class ModelKind
{
  linear,
  fcn
};

ModelKind   parse_model_kind(std::string_view name);
std::string to_string(ModelKind kind);

struct Phase
{
  double learning_rate;
  int    epochs;
};

/// SGD recipe: momentum 0.9, batches of 250, 100 epochs at 1e-2 then 50 at
/// 1e-3, stopping once the training error drops below 5e-4.
struct TrainConfig
{
  double        momentum{0.9};
  std::size_t   batch_size{250};
  Phase         phase1{1e-2, 100};
  Phase         phase2{1e-3, 50};
  double        early_stop_error{5e-4};
  std::size_t   hidden_width{256};  ///< fcn only
  std::uint64_t seed{0};

  void validate() const;
};

/// Affine map `out = weight * in + bias`; weight is (out x in).
struct Layer
{
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/**
 * Linear model (one affine layer) or fully-connected network (affine, ReLU,
 * affine) producing K logits. Immutable once built.
 */
class Classifier
{
public:
  Classifier(ModelKind kind, std::vector<Layer> layers);

  /// Fan-in scaled uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static Classifier initialize(ModelKind kind, std::size_t input_dim, std::size_t num_classes,
                               std::size_t hidden_width, Rng &rng);

  /// All parameters zero; predicts class 0 everywhere.
  static Classifier zeros(ModelKind kind, std::size_t input_dim, std::size_t num_classes,
                          std::size_t hidden_width = 256);

  ModelKind                 kind() const { return kind_; }
  std::size_t               input_dim() const;
  std::size_t               num_classes() const;
  std::vector<Layer> const &layers() const { return layers_; }

  Eigen::VectorXd logits(std::span<double const> x) const;
  Eigen::VectorXd scores(std::span<double const> x) const;
  int             predict(std::span<double const> x) const;

  /// Row-wise batch versions; xs is n x d.
  Eigen::MatrixXd  logits(Matrix const &xs) const;
  Eigen::MatrixXd  scores(Matrix const &xs) const;
  std::vector<int> predict(Matrix const &xs) const;

  /// Mean negative log-likelihood over the rows of xs.
  double nll(Matrix const &xs, std::span<int const> labels) const;

  /// Mean NLL and its gradient with respect to every layer.
  double nll_gradient(Matrix const &xs, std::span<int const> labels,
                      std::vector<Layer> &gradient) const;

  /// Parameters flattened layer by layer (weight column-major, then bias).
  std::vector<double> parameters() const;
  Classifier          with_parameters(std::span<double const> flat) const;

private:
  void check_dim(std::size_t d) const;
  Eigen::MatrixXd forward(Matrix const &xs, Eigen::MatrixXd *hidden) const;

  ModelKind          kind_;
  std::vector<Layer> layers_;
};

/// Numerically stable softmax of one logit vector.
Eigen::VectorXd softmax(Eigen::VectorXd const &logits);

/// Index of the largest entry; ties go to the lowest index.
int argmax(Eigen::VectorXd const &values);

/// Minimizes NLL with mini-batch momentum SGD under `cfg`. Deterministic in cfg.seed.
Classifier train(LabeledDataset const &ds, ModelKind kind, TrainConfig const &cfg);

/// Fraction of rows whose prediction differs from the label.
double empirical_risk(Classifier const &h, LabeledDataset const &ds);

/// Fraction of rows on which h and g predict different classes.
double disagreement(Classifier const &h, Classifier const &g, Matrix const &xs);

// Model file --------------------------------------------------------------
//
//   shiftdiag-model 1
//   kind <linear|fcn>
//   input_dim <d>
//   num_classes <K>
//   layers <L>
//   layer <rows> <cols>
//   <rows*cols weights, row-major, one row per line>
//   <rows biases>
//   ...
//
// Values use the shortest round-trip decimal form, so load(save(h)) is exact.

void       save_model(Classifier const &h, std::filesystem::path const &path);
Classifier load_model(std::filesystem::path const &path);

}  // namespace shiftdiag
