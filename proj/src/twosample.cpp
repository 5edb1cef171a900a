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

#include "shiftdiag/twosample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "shiftdiag/error.hpp"
#include "shiftdiag/rng.hpp"

namespace shiftdiag {

std::string to_string(StatisticName name)
{
  switch (name)
  {
  case StatisticName::frs:
    return "frs";
  case StatisticName::energy:
    return "energy";
  case StatisticName::mmd:
    return "mmd";
  case StatisticName::bbsd:
    return "bbsd";
  }
  return "?";
}

namespace {

std::span<double const> row(Matrix const &m, Eigen::Index i)
{
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

void check_shared_dim(Matrix const &sx, Matrix const &tx)
{
  if (sx.cols() != tx.cols())
  {
    throw DataError("samples differ in dimension (" + std::to_string(sx.cols()) + " vs " +
                    std::to_string(tx.cols()) + ")");
  }
}

/// Sum of f over all (i, j) row pairs, optionally including i == j.
template <typename F>
double pair_sum(Matrix const &a, Matrix const &b, F const &f, bool diagonal)
{
  bool const same = &a == &b;
  double     sum  = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < b.rows(); ++j)
    {
      if (diagonal || !same || i != j)
      {
        sum += f(row(a, i), row(b, j));
      }
    }
  }
  return sum;
}

/// The two samples in a fixed order, so cross sums do not depend on argument order.
std::pair<Matrix const &, Matrix const &> canonical(Matrix const &a, Matrix const &b)
{
  auto const key = [](Matrix const &m) { return std::pair(m.rows(), m.cols()); };
  bool swap      = key(b) < key(a);
  if (key(a) == key(b))
  {
    swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
  }
  return swap ? std::pair<Matrix const &, Matrix const &>(b, a)
              : std::pair<Matrix const &, Matrix const &>(a, b);
}

}  // namespace

double euclidean(std::span<double const> a, std::span<double const> b)
{
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
  {
    double const diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

Matrix pool(Matrix const &a, Matrix const &b)
{
  check_shared_dim(a, b);
  Matrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows())    = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

std::vector<Edge> minimum_spanning_tree(Matrix const &points)
{
  auto const n = static_cast<std::size_t>(points.rows());
  if (n < 2)
  {
    return {};
  }

  // key[v]: lightest known edge (weight, lo, hi) joining v to the tree.
  using Key = std::tuple<double, std::size_t, std::size_t>;
  std::vector<Key>  key(n, Key{std::numeric_limits<double>::infinity(), n, n});
  std::vector<char> in_tree(n, 0);
  std::vector<Edge> tree;
  tree.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0]          = 1;
  for (std::size_t step = 1; step < n; ++step)
  {
    auto const from = row(points, static_cast<Eigen::Index>(current));
    for (std::size_t v = 0; v < n; ++v)
    {
      if (in_tree[v])
      {
        continue;
      }
      Key const candidate{euclidean(from, row(points, static_cast<Eigen::Index>(v))),
                          std::min(current, v), std::max(current, v)};
      if (candidate < key[v])
      {
        key[v] = candidate;
      }
    }
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v)
    {
      if (!in_tree[v] && (next == n || key[v] < key[next]))
      {
        next = v;
      }
    }
    auto const &[w, lo, hi] = key[next];
    tree.push_back({lo, hi, w});
    in_tree[next] = 1;
    current       = next;
  }
  return tree;
}

StatisticValue frs_statistic(Matrix const &sx, Matrix const &tx)
{
  check_shared_dim(sx, tx);
  auto const n = static_cast<std::size_t>(sx.rows());
  auto const m = static_cast<std::size_t>(tx.rows());
  if (n < 1 || m < 1 || n + m < 3)
  {
    throw DataError("FRS needs n >= 1, m >= 1 and n + m >= 3");
  }
  auto const  tree = minimum_spanning_tree(pool(sx, tx));
  std::size_t same = 0;
  for (auto const &e : tree)
  {
    same += (e.u < n) == (e.v < n) ? 1 : 0;
  }
  return {StatisticName::frs, static_cast<double>(same) / static_cast<double>(n + m - 2), 0.0,
          n + m, same};
}

StatisticValue energy_statistic(Matrix const &sx, Matrix const &tx)
{
  check_shared_dim(sx, tx);
  if (sx.rows() < 1 || tx.rows() < 1)
  {
    throw DataError("energy statistic needs non-empty samples");
  }
  auto const dist = [](auto const &a, auto const &b) { return euclidean(a, b); };
  auto const mean = [&dist](Matrix const &a, Matrix const &b) {
    return pair_sum(a, b, dist, true) / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
  };
  auto const &[a, b] = canonical(sx, tx);
  double const value = 2.0 * mean(a, b) - (mean(sx, sx) + mean(tx, tx));
  return {StatisticName::energy, value};
}

std::vector<std::size_t> median_subsample(std::size_t count, std::uint64_t seed)
{
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::size_t const keep = std::min<std::size_t>(100, count);
  if (keep < count)
  {
    // Partial Fisher-Yates: the first `keep` slots are a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < keep; ++i)
    {
      auto const j = i + static_cast<std::size_t>(rng.uniform_below(count - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

double median_bandwidth(Matrix const &pooled, std::uint64_t seed)
{
  if (pooled.rows() < 2)
  {
    throw DataError("median bandwidth needs at least 2 points");
  }
  auto const          idx = median_subsample(static_cast<std::size_t>(pooled.rows()), seed);
  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
  {
    for (std::size_t j = i + 1; j < idx.size(); ++j)
    {
      dist.push_back(euclidean(row(pooled, static_cast<Eigen::Index>(idx[i])),
                               row(pooled, static_cast<Eigen::Index>(idx[j]))));
    }
  }
  std::sort(dist.begin(), dist.end());
  std::size_t const mid    = dist.size() / 2;
  double const      median = dist.size() % 2 ? dist[mid] : 0.5 * (dist[mid - 1] + dist[mid]);
  if (median > 0.0)
  {
    return median;
  }
  auto const positive = std::upper_bound(dist.begin(), dist.end(), 0.0);
  return positive != dist.end() ? *positive : 1.0;
}

StatisticValue mmd_statistic(Matrix const &sx, Matrix const &tx, double sigma)
{
  check_shared_dim(sx, tx);
  if (sx.rows() < 2 || tx.rows() < 2)
  {
    throw DataError("MMD needs at least 2 points in each sample");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma))
  {
    throw DataError("MMD bandwidth must be positive and finite");
  }
  double const gamma = 1.0 / (2.0 * sigma * sigma);
  auto kernel = [gamma](std::span<double const> a, std::span<double const> b) {
    double const d = euclidean(a, b);
    return std::exp(-gamma * d * d);
  };
  auto const within = [&kernel](Matrix const &x) {
    auto const k = static_cast<double>(x.rows());
    return pair_sum(x, x, kernel, false) / (k * (k - 1.0));
  };
  auto const &[a, b] = canonical(sx, tx);
  double const across = pair_sum(a, b, kernel, true) /
                        (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
  double const value = (within(sx) + within(tx)) - 2.0 * across;
  return {StatisticName::mmd, value, sigma};
}

StatisticValue bbsd_statistic(Classifier const &h, Matrix const &sx, Matrix const &tx,
                              std::uint64_t seed)
{
  Matrix const ss    = h.scores(sx);
  Matrix const ts    = h.scores(tx);
  double const sigma = median_bandwidth(pool(ss, ts), seed);
  auto         out   = mmd_statistic(ss, ts, sigma);
  out.name           = StatisticName::bbsd;
  return out;
}

}  // namespace shiftdiag
