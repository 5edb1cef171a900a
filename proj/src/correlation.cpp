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

#include "shiftdiag/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftdiag/error.hpp"

namespace shiftdiag {

double pearson(std::span<double const> xs, std::span<double const> ys)
{
  if (xs.size() != ys.size())
  {
    throw DataError("correlation inputs differ in length");
  }
  if (xs.size() < 2)
  {
    throw DataError("correlation needs at least 2 points");
  }
  std::vector<std::pair<double, double>> pairs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    pairs[i] = {xs[i], ys[i]};
  }
  std::sort(pairs.begin(), pairs.end());

  auto const n  = static_cast<double>(pairs.size());
  double     mx = 0.0, my = 0.0;
  for (auto const &[x, y] : pairs)
  {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (auto const &[x, y] : pairs)
  {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0))
  {
    throw DataError("correlation undefined: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<double const> values)
{
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();)
  {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
    {
      ++j;
    }
    double const rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
    {
      ranks[order[k]] = rank;
    }
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<double const> xs, std::span<double const> ys)
{
  if (xs.size() != ys.size())
  {
    throw DataError("correlation inputs differ in length");
  }
  auto const rx = average_ranks(xs);
  auto const ry = average_ranks(ys);
  return pearson(rx, ry);
}

SteigerResult steiger_test(double r_jk, double r_jh, double r_kh, std::size_t n)
{
  for (double r : {r_jk, r_jh, r_kh})
  {
    if (!(std::abs(r) < 1.0))
    {
      throw DataError("Steiger test needs |r| < 1 for every correlation");
    }
  }
  if (n < 4)
  {
    throw DataError("Steiger test needs n >= 4");
  }
  if (r_jk == r_jh)
  {
    return {0.0, 1.0};
  }
  double const det = 1.0 - r_jk * r_jk - r_jh * r_jh - r_kh * r_kh + 2.0 * r_jk * r_jh * r_kh;
  if (!(det > 0.0))
  {
    throw DataError("Steiger test: the three correlations are mutually inconsistent");
  }
  double const mean  = 0.5 * (r_jk + r_jh);
  double const mean2 = mean * mean;
  double const psi   = r_kh * (1.0 - 2.0 * mean2) - 0.5 * mean2 * (1.0 - 2.0 * mean2 - r_kh * r_kh);
  double const cov   = psi / ((1.0 - mean2) * (1.0 - mean2));
  if (!(cov < 1.0))
  {
    throw DataError("Steiger test: degenerate covariance of the transformed correlations");
  }
  double const z = (std::atanh(r_jk) - std::atanh(r_jh)) * std::sqrt(static_cast<double>(n) - 3.0) /
                   std::sqrt(2.0 - 2.0 * cov);
  return {z, std::erfc(std::abs(z) / std::sqrt(2.0))};
}

std::vector<Subset> parse_subsets(std::string_view spec)
{
  std::vector<Subset> out;
  std::size_t         start = 0;
  while (start <= spec.size())
  {
    auto       end  = spec.find(',', start);
    auto const item = spec.substr(start, end == std::string_view::npos ? spec.npos : end - start);
    if (item == "all")
    {
      out.push_back({"all", "", ""});
    }
    else
    {
      auto const eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size())
      {
        throw ConfigError("bad subset '" + std::string(item) + "' (expected all or key=value)");
      }
      out.push_back({std::string(item.substr(eq + 1)), std::string(item.substr(0, eq)),
                     std::string(item.substr(eq + 1))});
    }
    if (end == std::string_view::npos)
    {
      break;
    }
    start = end + 1;
  }
  return out;
}

std::vector<std::string> const &statistic_names()
{
  static std::vector<std::string> const names{"frs", "energy", "mmd", "bbsd", "hdisc"};
  return names;
}

double statistic_value(ShiftStatistics const &stats, std::string_view name)
{
  if (name == "frs")
  {
    return stats.frs;
  }
  if (name == "energy")
  {
    return stats.energy;
  }
  if (name == "mmd")
  {
    return stats.mmd;
  }
  if (name == "bbsd")
  {
    return stats.bbsd;
  }
  if (name == "hdisc")
  {
    return stats.hdisc;
  }
  throw ConfigError("unknown statistic '" + std::string(name) + "'");
}

namespace {

using CorrFn = double (*)(std::span<double const>, std::span<double const>);

std::optional<double> try_corr(CorrFn fn, std::vector<double> const &a, std::vector<double> const &b,
                               std::string &error)
{
  try
  {
    return fn(a, b);
  }
  catch (DataError const &e)
  {
    error = e.what();
    return std::nullopt;
  }
}

}  // namespace

CorrelationTable correlate(std::span<ExperimentRecord const> records,
                           std::span<Subset const> subsets, bool with_steiger)
{
  CorrelationTable table;
  for (auto const &subset : subsets)
  {
    std::vector<ExperimentRecord const *> members;
    for (auto const &r : records)
    {
      if (!r.ok())
      {
        continue;
      }
      if (!subset.key.empty())
      {
        auto it = r.tags.find(subset.key);
        if (it == r.tags.end() || it->second != subset.value)
        {
          continue;
        }
      }
      members.push_back(&r);
    }

    SubsetCorrelations row{subset.name, members.size(), {}, {}};
    std::vector<double> gap;
    for (auto const *r : members)
    {
      gap.push_back(r->error_gap);
    }
    std::vector<std::vector<double>> values;
    for (auto const &name : statistic_names())
    {
      std::vector<double> v;
      for (auto const *r : members)
      {
        v.push_back(statistic_value(r->stats, name));
      }
      CorrelationCell cell{name, {}, {}, {}};
      std::string     error;
      cell.spearman = try_corr(&spearman, v, gap, error);
      cell.pearson  = try_corr(&pearson, v, gap, error);
      if (!error.empty())
      {
        cell.error = error;
      }
      row.cells.push_back(std::move(cell));
      values.push_back(std::move(v));
    }

    if (with_steiger)
    {
      auto const  hd_index = statistic_names().size() - 1;
      auto const &hd       = values[hd_index];
      for (auto const &[method, fn] : {std::pair<char const *, CorrFn>{"pearson", &pearson},
                                       std::pair<char const *, CorrFn>{"spearman", &spearman}})
      {
        for (std::size_t s = 0; s < hd_index; ++s)
        {
          SteigerComparison cmp{method, statistic_names()[s], {}, {}, {}};
          std::string       error;
          auto const        r_jk = try_corr(fn, gap, hd, error);
          auto const        r_jh = try_corr(fn, gap, values[s], error);
          auto const        r_kh = try_corr(fn, hd, values[s], error);
          if (r_jk && r_jh && r_kh)
          {
            try
            {
              auto const res = steiger_test(*r_jk, *r_jh, *r_kh, members.size());
              cmp.z          = res.z;
              cmp.p_value    = res.p_value;
            }
            catch (DataError const &e)
            {
              error = e.what();
            }
          }
          if (!error.empty())
          {
            cmp.error = error;
          }
          row.steiger.push_back(std::move(cmp));
        }
      }
    }
    table.subsets.push_back(std::move(row));
  }
  return table;
}

}  // namespace shiftdiag
