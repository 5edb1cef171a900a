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

#include "shiftdiag/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "shiftdiag/error.hpp"
#include "shiftdiag/rng.hpp"

namespace shiftdiag {

ModelKind parse_model_kind(std::string_view name)
{
  if (name == "linear" || name == "lin")
  {
    return ModelKind::linear;
  }
  if (name == "fcn")
  {
    return ModelKind::fcn;
  }
  throw ConfigError("unknown classifier kind '" + std::string(name) + "' (expected linear or fcn)");
}

std::string to_string(ModelKind kind)
{
  return kind == ModelKind::linear ? "linear" : "fcn";
}

void TrainConfig::validate() const
{
  if (!(phase1.learning_rate > 0.0) || !(phase2.learning_rate > 0.0))
  {
    throw ConfigError("learning rates must be positive");
  }
  if (phase1.epochs < 0 || phase2.epochs < 0)
  {
    throw ConfigError("epoch counts must be non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0))
  {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (batch_size == 0)
  {
    throw ConfigError("batch size must be positive");
  }
  if (hidden_width == 0)
  {
    throw ConfigError("hidden width must be positive");
  }
}

// Classifier ----------------------------------------------------------------

Classifier::Classifier(ModelKind kind, std::vector<Layer> layers)
  : kind_(kind)
  , layers_(std::move(layers))
{
  std::size_t const expected = kind_ == ModelKind::linear ? 1 : 2;
  if (layers_.size() != expected)
  {
    throw DataError(to_string(kind_) + " model needs " + std::to_string(expected) + " layer(s)");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i)
  {
    auto const &layer = layers_[i];
    if (layer.weight.rows() != layer.bias.size() || layer.weight.size() == 0)
    {
      throw DataError("layer " + std::to_string(i) + " has inconsistent shape");
    }
    if (i > 0 && layer.weight.cols() != layers_[i - 1].weight.rows())
    {
      throw DataError("layer " + std::to_string(i) + " does not chain with its predecessor");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
    {
      throw DataError("layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
  if (layers_.back().weight.rows() < 2)
  {
    throw DataError("classifier needs at least 2 classes");
  }
}

Classifier Classifier::initialize(ModelKind kind, std::size_t input_dim, std::size_t num_classes,
                                  std::size_t hidden_width, Rng &rng)
{
  auto make = [&rng](std::size_t out, std::size_t in) {
    double const bound = 1.0 / std::sqrt(static_cast<double>(in));
    Layer        layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
    {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      {
        layer.weight(r, c) = rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
    {
      layer.bias(r) = rng.uniform(-bound, bound);
    }
    return layer;
  };

  std::vector<Layer> layers;
  if (kind == ModelKind::linear)
  {
    layers.push_back(make(num_classes, input_dim));
  }
  else
  {
    layers.push_back(make(hidden_width, input_dim));
    layers.push_back(make(num_classes, hidden_width));
  }
  return {kind, std::move(layers)};
}

Classifier Classifier::zeros(ModelKind kind, std::size_t input_dim, std::size_t num_classes,
                             std::size_t hidden_width)
{
  auto make = [](std::size_t out, std::size_t in) {
    return Layer{Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)};
  };
  std::vector<Layer> layers;
  if (kind == ModelKind::linear)
  {
    layers.push_back(make(num_classes, input_dim));
  }
  else
  {
    layers.push_back(make(hidden_width, input_dim));
    layers.push_back(make(num_classes, hidden_width));
  }
  return {kind, std::move(layers)};
}

std::size_t Classifier::input_dim() const
{
  return static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t Classifier::num_classes() const
{
  return static_cast<std::size_t>(layers_.back().weight.rows());
}

void Classifier::check_dim(std::size_t d) const
{
  if (d != input_dim())
  {
    throw DataError("feature dimension " + std::to_string(d) + " does not match classifier input " +
                    std::to_string(input_dim()));
  }
}

Eigen::VectorXd Classifier::logits(std::span<double const> x) const
{
  check_dim(x.size());
  Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd const>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < layers_.size(); ++i)
  {
    a = layers_[i].weight * a + layers_[i].bias;
    if (i + 1 < layers_.size())
    {
      a = a.cwiseMax(0.0);
    }
  }
  return a;
}

Eigen::VectorXd Classifier::scores(std::span<double const> x) const
{
  return softmax(logits(x));
}

int Classifier::predict(std::span<double const> x) const
{
  return argmax(logits(x));
}

Eigen::MatrixXd Classifier::forward(Matrix const &xs, Eigen::MatrixXd *hidden) const
{
  check_dim(static_cast<std::size_t>(xs.cols()));
  if (kind_ == ModelKind::linear)
  {
    Eigen::MatrixXd out = xs * layers_[0].weight.transpose();
    out.rowwise() += layers_[0].bias.transpose();
    return out;
  }
  Eigen::MatrixXd h = xs * layers_[0].weight.transpose();
  h.rowwise() += layers_[0].bias.transpose();
  h = h.cwiseMax(0.0);
  Eigen::MatrixXd out = h * layers_[1].weight.transpose();
  out.rowwise() += layers_[1].bias.transpose();
  if (hidden)
  {
    *hidden = std::move(h);
  }
  return out;
}

Eigen::MatrixXd Classifier::logits(Matrix const &xs) const
{
  return forward(xs, nullptr);
}

namespace {

// Row-wise softmax via max subtraction.
void softmax_rows(Eigen::MatrixXd &z)
{
  for (Eigen::Index i = 0; i < z.rows(); ++i)
  {
    double const top = z.row(i).maxCoeff();
    z.row(i)         = (z.row(i).array() - top).exp();
    z.row(i) /= z.row(i).sum();
  }
}

int argmax_row(Eigen::MatrixXd const &z, Eigen::Index row)
{
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < z.cols(); ++k)
  {
    if (z(row, k) > z(row, best))
    {
      best = k;
    }
  }
  return static_cast<int>(best);
}

}  // namespace

Eigen::MatrixXd Classifier::scores(Matrix const &xs) const
{
  auto z = forward(xs, nullptr);
  softmax_rows(z);
  return z;
}

std::vector<int> Classifier::predict(Matrix const &xs) const
{
  auto const       z = forward(xs, nullptr);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i)
  {
    out[static_cast<std::size_t>(i)] = argmax_row(z, i);
  }
  return out;
}

namespace {

// Per-row NLL via log-sum-exp; fills `probs` with the softmax.
double mean_nll(Eigen::MatrixXd const &z, std::span<int const> labels, Eigen::MatrixXd &probs)
{
  probs      = z;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
  {
    double const top = z.row(i).maxCoeff();
    double const lse = top + std::log((z.row(i).array() - top).exp().sum());
    sum += lse - z(i, labels[static_cast<std::size_t>(i)]);
    probs.row(i) = (z.row(i).array() - lse).exp();
  }
  return sum / static_cast<double>(z.rows());
}

void check_labels(Matrix const &xs, std::span<int const> labels, std::size_t num_classes)
{
  if (static_cast<std::size_t>(xs.rows()) != labels.size() || labels.empty())
  {
    throw DataError("feature rows and labels differ in count");
  }
  for (int y : labels)
  {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
    {
      throw DataError("label " + std::to_string(y) + " outside the classifier's label space");
    }
  }
}

}  // namespace

double Classifier::nll(Matrix const &xs, std::span<int const> labels) const
{
  check_labels(xs, labels, num_classes());
  Eigen::MatrixXd probs;
  return mean_nll(forward(xs, nullptr), labels, probs);
}

double Classifier::nll_gradient(Matrix const &xs, std::span<int const> labels,
                                std::vector<Layer> &gradient) const
{
  check_labels(xs, labels, num_classes());
  Eigen::MatrixXd hidden;
  Eigen::MatrixXd delta;
  double const    loss = mean_nll(forward(xs, &hidden), labels, delta);

  double const scale = 1.0 / static_cast<double>(xs.rows());
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    delta(static_cast<Eigen::Index>(i), labels[i]) -= 1.0;
  }
  delta *= scale;

  gradient.resize(layers_.size());
  if (kind_ == ModelKind::linear)
  {
    gradient[0].weight = delta.transpose() * xs;
    gradient[0].bias   = delta.colwise().sum().transpose();
    return loss;
  }
  gradient[1].weight = delta.transpose() * hidden;
  gradient[1].bias   = delta.colwise().sum().transpose();

  Eigen::MatrixXd back = delta * layers_[1].weight;
  back.array() *= (hidden.array() > 0.0).cast<double>();
  gradient[0].weight = back.transpose() * xs;
  gradient[0].bias   = back.colwise().sum().transpose();
  return loss;
}

std::vector<double> Classifier::parameters() const
{
  std::vector<double> flat;
  for (auto const &layer : layers_)
  {
    flat.insert(flat.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    flat.insert(flat.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return flat;
}

Classifier Classifier::with_parameters(std::span<double const> flat) const
{
  auto        layers = layers_;
  std::size_t at     = 0;
  for (auto &layer : layers)
  {
    auto const nw = static_cast<std::size_t>(layer.weight.size());
    auto const nb = static_cast<std::size_t>(layer.bias.size());
    if (at + nw + nb > flat.size())
    {
      throw DataError("parameter vector too short");
    }
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), nw, layer.weight.data());
    at += nw;
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), nb, layer.bias.data());
    at += nb;
  }
  if (at != flat.size())
  {
    throw DataError("parameter vector too long");
  }
  return {kind_, std::move(layers)};
}

Eigen::VectorXd softmax(Eigen::VectorXd const &logits)
{
  double const    top = logits.maxCoeff();
  Eigen::VectorXd e   = (logits.array() - top).exp();
  return e / e.sum();
}

int argmax(Eigen::VectorXd const &values)
{
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k)
  {
    if (values(k) > values(best))
    {
      best = k;
    }
  }
  return static_cast<int>(best);
}

// Training ------------------------------------------------------------------

Classifier train(LabeledDataset const &ds, ModelKind kind, TrainConfig const &cfg)
{
  cfg.validate();
  Rng        rng(cfg.seed);
  Classifier model = Classifier::initialize(kind, ds.dim(), static_cast<std::size_t>(ds.num_classes()),
                                            cfg.hidden_width, rng);

  std::size_t const n     = ds.size();
  std::size_t const batch = std::min(cfg.batch_size, n);

  std::vector<Layer> params   = model.layers();
  std::vector<Layer> velocity = params;
  for (auto &v : velocity)
  {
    v.weight.setZero();
    v.bias.setZero();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix             xb;
  std::vector<int>   yb;
  std::vector<Layer> grad;

  int epoch = 0;
  for (Phase const &phase : {cfg.phase1, cfg.phase2})
  {
    for (int e = 0; e < phase.epochs; ++e, ++epoch)
    {
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t start = 0, b = 0; start < n; start += batch, ++b)
      {
        std::size_t const len = std::min(batch, n - start);
        xb.resize(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(ds.dim()));
        yb.resize(len);
        for (std::size_t i = 0; i < len; ++i)
        {
          xb.row(static_cast<Eigen::Index>(i)) =
              ds.features().row(static_cast<Eigen::Index>(order[start + i]));
          yb[i] = ds.labels()[order[start + i]];
        }

        double const loss = model.nll_gradient(xb, yb, grad);
        if (!std::isfinite(loss))
        {
          throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(b));
        }
        for (std::size_t l = 0; l < params.size(); ++l)
        {
          velocity[l].weight = cfg.momentum * velocity[l].weight + grad[l].weight;
          velocity[l].bias   = cfg.momentum * velocity[l].bias + grad[l].bias;
          params[l].weight -= phase.learning_rate * velocity[l].weight;
          params[l].bias -= phase.learning_rate * velocity[l].bias;
        }
        model = Classifier(kind, params);
      }
      if (empirical_risk(model, ds) < cfg.early_stop_error)
      {
        return model;
      }
    }
  }
  return model;
}

double empirical_risk(Classifier const &h, LabeledDataset const &ds)
{
  auto const  predicted = h.predict(ds.features());
  std::size_t wrong     = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
  {
    wrong += predicted[i] != ds.labels()[i] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

double disagreement(Classifier const &h, Classifier const &g, Matrix const &xs)
{
  if (xs.rows() == 0)
  {
    throw DataError("disagreement over an empty sample");
  }
  auto const  a = h.predict(xs);
  auto const  b = g.predict(xs);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    differ += a[i] != b[i] ? 1 : 0;
  }
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

// Model file ----------------------------------------------------------------

namespace {

constexpr std::string_view kMagic   = "shiftdiag-model";
constexpr int              kVersion = 1;

void put(std::ostream &out, double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

double take(std::istream &in, std::filesystem::path const &path)
{
  std::string token;
  if (!(in >> token))
  {
    throw DataError(path.string() + ": truncated model file");
  }
  double v   = 0.0;
  auto   res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
  {
    throw DataError(path.string() + ": bad number '" + token + "'");
  }
  return v;
}

void expect(std::istream &in, std::string_view key, std::filesystem::path const &path)
{
  std::string token;
  if (!(in >> token) || token != key)
  {
    throw DataError(path.string() + ": expected '" + std::string(key) + "'");
  }
}

}  // namespace

void save_model(Classifier const &h, std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw DataError("cannot write " + path.string());
  }
  out << kMagic << ' ' << kVersion << '\n'
      << "kind " << to_string(h.kind()) << '\n'
      << "input_dim " << h.input_dim() << '\n'
      << "num_classes " << h.num_classes() << '\n'
      << "layers " << h.layers().size() << '\n';
  for (auto const &layer : h.layers())
  {
    out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
    {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      {
        if (c)
        {
          out << ' ';
        }
        put(out, layer.weight(r, c));
      }
      out << '\n';
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
    {
      if (r)
      {
        out << ' ';
      }
      put(out, layer.bias(r));
    }
    out << '\n';
  }
  if (!out)
  {
    throw DataError("failed writing " + path.string());
  }
}

Classifier load_model(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw DataError("cannot open model file " + path.string());
  }
  std::string magic;
  int         version = 0;
  if (!(in >> magic >> version) || magic != kMagic)
  {
    throw DataError(path.string() + ": not a shiftdiag model file");
  }
  if (version != kVersion)
  {
    throw DataError(path.string() + ": unsupported model version " + std::to_string(version));
  }
  std::string kind_name;
  std::size_t input_dim = 0, num_classes = 0, count = 0;
  expect(in, "kind", path);
  in >> kind_name;
  expect(in, "input_dim", path);
  in >> input_dim;
  expect(in, "num_classes", path);
  in >> num_classes;
  expect(in, "layers", path);
  in >> count;
  if (!in || count > 8)
  {
    throw DataError(path.string() + ": malformed model header");
  }

  std::vector<Layer> layers;
  for (std::size_t l = 0; l < count; ++l)
  {
    expect(in, "layer", path);
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
    {
      throw DataError(path.string() + ": malformed layer shape");
    }
    Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      for (Eigen::Index c = 0; c < cols; ++c)
      {
        layer.weight(r, c) = take(in, path);
      }
    }
    for (Eigen::Index r = 0; r < rows; ++r)
    {
      layer.bias(r) = take(in, path);
    }
    layers.push_back(std::move(layer));
  }
  Classifier model(parse_model_kind(kind_name), std::move(layers));
  if (model.input_dim() != input_dim || model.num_classes() != num_classes)
  {
    throw DataError(path.string() + ": header dimensions disagree with layer shapes");
  }
  return model;
}

}  // namespace shiftdiag
