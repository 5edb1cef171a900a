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

#include "shiftdiag/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "shiftdiag/error.hpp"
#include "shiftdiag/twosample.hpp"

namespace shiftdiag {

namespace {

void check_pair(LabeledDataset const &s, LabeledDataset const &t)
{
  if (s.dim() != t.dim() || s.num_classes() != t.num_classes())
  {
    throw DataError("source and target differ in dimension or label space");
  }
}

// Disagreement rates of g with h on both samples; |a - b| is one direction.
double direction_gap(Classifier const &h, Classifier const &g, Matrix const &agree,
                     Matrix const &disagree)
{
  return std::abs(disagreement(h, g, agree) - disagreement(h, g, disagree));
}

Classifier fit_adversary(Classifier const &h, Matrix const &agree, Matrix const &disagree,
                         ModelKind kind, TrainConfig const &cfg)
{
  auto const  k = static_cast<int>(h.num_classes());
  std::vector parts{LabeledDataset(agree, h.predict(agree), k, "agree"),
                    LabeledDataset(disagree, next_best_labels(h, disagree), k, "disagree")};
  return train(concatenate(parts), kind, cfg);
}

}  // namespace

double error_gap(Classifier const &h, LabeledDataset const &s, LabeledDataset const &t)
{
  check_pair(s, t);
  return std::abs(empirical_risk(h, s) - empirical_risk(h, t));
}

std::vector<int> next_best_labels(Classifier const &h, Matrix const &xs)
{
  auto const       z = h.logits(xs);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i)
  {
    Eigen::Index top = 0;
    for (Eigen::Index k = 1; k < z.cols(); ++k)
    {
      if (z(i, k) > z(i, top))
      {
        top = k;
      }
    }
    Eigen::Index second = top == 0 ? 1 : 0;
    for (Eigen::Index k = second + 1; k < z.cols(); ++k)
    {
      if (k != top && z(i, k) > z(i, second))
      {
        second = k;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(second);
  }
  return out;
}

DiscrepancyResult hdiscrepancy(Classifier const &h, Matrix const &sx, Matrix const &tx,
                               ModelKind kind, TrainConfig const &cfg)
{
  if (sx.rows() < 1 || tx.rows() < 1)
  {
    throw DataError("h-discrepancy needs non-empty samples");
  }
  if (sx.cols() != tx.cols())
  {
    throw DataError("samples differ in dimension");
  }
  auto g_forward  = fit_adversary(h, sx, tx, kind, cfg);
  auto g_backward = fit_adversary(h, tx, sx, kind, cfg);

  double const forward  = direction_gap(h, g_forward, sx, tx);
  double const backward = direction_gap(h, g_backward, tx, sx);
  return {std::max(forward, backward), forward, backward, std::move(g_forward),
          std::move(g_backward)};
}

double hdiscrepancy_exact(Classifier const &h, Matrix const &sx, Matrix const &tx,
                          std::span<Classifier const> hypotheses)
{
  if (hypotheses.empty())
  {
    throw DataError("hypothesis list is empty");
  }
  double best = 0.0;
  for (auto const &g : hypotheses)
  {
    // |R_U(g) - R_V(g)| is the same quantity in either direction.
    best = std::max(best, direction_gap(h, g, sx, tx));
  }
  return best;
}

double adaptability(LabeledDataset const &s, LabeledDataset const &t, ModelKind kind,
                    TrainConfig const &cfg)
{
  check_pair(s, t);
  std::vector const parts{s, t};
  auto const        joint = train(concatenate(parts), kind, cfg);
  return empirical_risk(joint, s) + empirical_risk(joint, t);
}

double adaptability_exact(LabeledDataset const &s, LabeledDataset const &t,
                          std::span<Classifier const> hypotheses)
{
  check_pair(s, t);
  if (hypotheses.empty())
  {
    throw DataError("hypothesis list is empty");
  }
  double best = std::numeric_limits<double>::infinity();
  for (auto const &g : hypotheses)
  {
    best = std::min(best, empirical_risk(g, s) + empirical_risk(g, t));
  }
  return best;
}

BoundCertificate certify_bound(Classifier const &h, LabeledDataset const &s,
                               LabeledDataset const &t, std::span<Classifier const> hypotheses)
{
  if (hypotheses.empty())
  {
    throw DataError("hypothesis list is empty");
  }
  std::vector<Classifier> with_h(hypotheses.begin(), hypotheses.end());
  with_h.push_back(h);

  BoundCertificate cert{};
  cert.error_gap    = error_gap(h, s, t);
  cert.adaptability = adaptability_exact(s, t, with_h);
  cert.discrepancy  = hdiscrepancy_exact(h, s.features(), t.features(), with_h);

  // Every risk is a count over n or m, so the slack is an integer over n * m.
  auto const n   = static_cast<long long>(s.size());
  auto const m   = static_cast<long long>(t.size());
  auto const hs  = h.predict(s.features());
  auto const ht  = h.predict(t.features());
  auto count_ne  = [](std::vector<int> const &a, std::vector<int> const &b) {
    long long c = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      c += a[i] != b[i];
    }
    return c;
  };
  long long const gap = std::llabs(count_ne(hs, s.labels()) * m - count_ne(ht, t.labels()) * n);
  long long lambda = 2 * n * m, disc = 0;
  for (auto const &g : with_h)
  {
    auto const gs = g.predict(s.features());
    auto const gt = g.predict(t.features());
    lambda = std::min(lambda, count_ne(gs, s.labels()) * m + count_ne(gt, t.labels()) * n);
    disc   = std::max(disc, std::llabs(count_ne(gs, hs) * m - count_ne(gt, ht) * n));
  }
  cert.slack = static_cast<double>(lambda + disc - gap) / static_cast<double>(n * m);
  return cert;
}

std::vector<Classifier> threshold_hypotheses(Matrix const &xs)
{
  if (xs.rows() < 1)
  {
    throw DataError("threshold hypotheses need at least one point");
  }
  auto const              d = static_cast<std::size_t>(xs.cols());
  std::vector<Classifier> out;
  for (std::size_t c = 0; c < d; ++c)
  {
    std::vector<double> values(static_cast<std::size_t>(xs.rows()));
    for (Eigen::Index i = 0; i < xs.rows(); ++i)
    {
      values[static_cast<std::size_t>(i)] = xs(i, static_cast<Eigen::Index>(c));
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<double> cuts{values.front() - 1.0};
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
    {
      cuts.push_back(0.5 * (values[i] + values[i + 1]));
    }
    cuts.push_back(values.back() + 1.0);

    for (double tau : cuts)
    {
      for (double sign : {1.0, -1.0})
      {
        // Class 1 logit sign * (x_c - tau), class 0 logit 0.
        Layer layer{Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(d)), Eigen::VectorXd::Zero(2)};
        layer.weight(1, static_cast<Eigen::Index>(c)) = sign;
        layer.bias(1)                                 = -sign * tau;
        out.emplace_back(ModelKind::linear, std::vector{std::move(layer)});
      }
    }
  }
  return out;
}

}  // namespace shiftdiag
