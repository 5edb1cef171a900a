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

// Independent reference implementations used by the unit and acceptance tests.
// They share no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

#include "shiftdiag/classifier.hpp"
#include "shiftdiag/dataset.hpp"

namespace oracle {

using shiftdiag::Matrix;

inline double distance(Matrix const &a, Eigen::Index i, Matrix const &b, Eigen::Index j)
{
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
  {
    double const d = a(i, c) - b(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

struct KruskalEdge
{
  double      weight;
  std::size_t u;
  std::size_t v;
};

/// Kruskal with union-find over all pairs, edges ordered by (weight, u, v).
inline std::vector<KruskalEdge> kruskal(Matrix const &points)
{
  auto const               n = static_cast<std::size_t>(points.rows());
  std::vector<KruskalEdge> edges;
  for (std::size_t u = 0; u < n; ++u)
  {
    for (std::size_t v = u + 1; v < n; ++v)
    {
      edges.push_back({distance(points, static_cast<Eigen::Index>(u), points,
                                static_cast<Eigen::Index>(v)),
                       u, v});
    }
  }
  std::sort(edges.begin(), edges.end(), [](auto const &a, auto const &b) {
    return std::tie(a.weight, a.u, a.v) < std::tie(b.weight, b.u, b.v);
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x)
    {
      x = parent[x] = parent[parent[x]];
    }
    return x;
  };
  std::vector<KruskalEdge> tree;
  for (auto const &e : edges)
  {
    auto const a = find(e.u), b = find(e.v);
    if (a != b)
    {
      parent[a] = b;
      tree.push_back(e);
    }
  }
  return tree;
}

inline Matrix stack(Matrix const &a, Matrix const &b)
{
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

inline double frs(Matrix const &sx, Matrix const &tx)
{
  auto const  n    = static_cast<std::size_t>(sx.rows());
  auto const  tree = kruskal(stack(sx, tx));
  std::size_t same = 0;
  for (auto const &e : tree)
  {
    same += (e.u < n) == (e.v < n);
  }
  return static_cast<double>(same) / static_cast<double>(sx.rows() + tx.rows() - 2);
}

inline double mean_distance(Matrix const &a, Matrix const &b)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < b.rows(); ++j)
    {
      s += distance(a, i, b, j);
    }
  }
  return s / static_cast<double>(a.rows() * b.rows());
}

inline double energy(Matrix const &sx, Matrix const &tx)
{
  return 2.0 * mean_distance(sx, tx) - mean_distance(sx, sx) - mean_distance(tx, tx);
}

inline double rbf(Matrix const &a, Eigen::Index i, Matrix const &b, Eigen::Index j, double sigma)
{
  double const d = distance(a, i, b, j);
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

inline double mmd(Matrix const &sx, Matrix const &tx, double sigma)
{
  auto within = [sigma](Matrix const &x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
    {
      for (Eigen::Index j = 0; j < x.rows(); ++j)
      {
        if (i != j)
        {
          s += rbf(x, i, x, j, sigma);
        }
      }
    }
    return s / static_cast<double>(x.rows() * (x.rows() - 1));
  };
  double cross = 0.0;
  for (Eigen::Index i = 0; i < sx.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < tx.rows(); ++j)
    {
      cross += rbf(sx, i, tx, j, sigma);
    }
  }
  return within(sx) + within(tx) - 2.0 * cross / static_cast<double>(sx.rows() * tx.rows());
}

/// Central finite-difference gradient of the mean NLL.
inline std::vector<double> numeric_gradient(shiftdiag::Classifier const &h, Matrix const &xs,
                                            std::vector<int> const &labels, double step = 1e-5)
{
  auto                params = h.parameters();
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    double const keep = params[i];
    params[i]         = keep + step;
    double const up   = h.with_parameters(params).nll(xs, labels);
    params[i]         = keep - step;
    double const down = h.with_parameters(params).nll(xs, labels);
    params[i]         = keep;
    grad[i]           = (up - down) / (2.0 * step);
  }
  return grad;
}

/// Worst per-component relative error; components where both values are
/// below `floor` in magnitude are compared absolutely.
inline double gradient_error(std::vector<double> const &analytic, std::vector<double> const &numeric,
                             double floor = 1e-6)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
  {
    double const scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst              = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

/// 1-D threshold rule: predicts 1 iff sign * (x - tau) > 0.
struct Threshold
{
  double tau;
  int    sign;

  int operator()(double x) const { return sign * (x - tau) > 0.0 ? 1 : 0; }
};

/// Exact sample quantities of the error-gap bound, by direct enumeration.
struct Certificate
{
  double gap;
  double lambda;
  double discrepancy;
};

inline Certificate certify(Threshold h, std::vector<Threshold> const &list,
                           std::vector<double> const &sx, std::vector<int> const &sy,
                           std::vector<double> const &tx, std::vector<int> const &ty)
{
  auto risk = [](auto const &f, std::vector<double> const &x, std::vector<int> const &y) {
    double wrong = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      wrong += f(x[i]) != y[i];
    }
    return wrong / static_cast<double>(x.size());
  };
  auto agree_rate = [](Threshold g, Threshold hh, std::vector<double> const &x) {
    double diff = 0.0;
    for (double v : x)
    {
      diff += g(v) != hh(v);
    }
    return diff / static_cast<double>(x.size());
  };
  Certificate c{std::abs(risk(h, sx, sy) - risk(h, tx, ty)), 2.0, 0.0};
  for (auto const &g : list)
  {
    c.lambda      = std::min(c.lambda, risk(g, sx, sy) + risk(g, tx, ty));
    c.discrepancy = std::max(c.discrepancy, std::abs(agree_rate(g, h, sx) - agree_rate(g, h, tx)));
  }
  return c;
}

/// Binary linear classifier computing Threshold{tau, sign} on coordinate 0 of a 1-D input.
inline shiftdiag::Classifier as_classifier(Threshold t)
{
  shiftdiag::Layer layer{Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2)};
  layer.weight(1, 0) = t.sign;
  layer.bias(1)      = -t.sign * t.tau;
  return shiftdiag::Classifier(shiftdiag::ModelKind::linear, {layer});
}

}  // namespace oracle
