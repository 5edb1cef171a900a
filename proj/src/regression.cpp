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

#include "shiftdiag/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "shiftdiag/error.hpp"

namespace shiftdiag {

DesignSpec DesignSpec::standard()
{
  return {{{"hspace", "kind", "fcn"}, {"group", "group", ""}, {"bert", "encoding", ""},
           {"news", "news", ""}},
          true,
          true};
}

namespace {

std::string const &level_of(ExperimentRecord const &r, CategoricalFactor const &f)
{
  if (f.source == "kind")
  {
    return r.kind;
  }
  auto it = r.tags.find(f.source);
  if (it == r.tags.end())
  {
    throw DataError("record '" + r.id + "' has no '" + f.source + "' tag required by factor '" +
                    f.name + "'");
  }
  return it->second;
}

void check_rank(Eigen::MatrixXd const &x, std::vector<std::string> const &columns)
{
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == x.cols())
  {
    return;
  }
  std::string dependent;
  auto const &perm = qr.colsPermutation().indices();
  for (Eigen::Index i = qr.rank(); i < x.cols(); ++i)
  {
    auto const c = static_cast<std::size_t>(perm(i));
    dependent += (dependent.empty() ? "" : ", ") + (c < columns.size() ? columns[c] : std::to_string(c));
  }
  throw DataError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                  std::to_string(x.cols()) + "); dependent columns: " + dependent);
}

}  // namespace

Design build_design(std::span<ExperimentRecord const> all, DesignSpec const &spec)
{
  std::vector<ExperimentRecord const *> records;
  for (auto const &r : all)
  {
    if (r.ok())
    {
      records.push_back(&r);
    }
  }

  // Indicator columns: (factor index, level).
  struct Indicator
  {
    std::size_t factor;
    std::string level;
    std::string name;
  };
  std::vector<Indicator> indicators;
  for (std::size_t f = 0; f < spec.categorical.size(); ++f)
  {
    auto const           &factor = spec.categorical[f];
    std::set<std::string> levels;
    for (auto const *r : records)
    {
      levels.insert(level_of(*r, factor));
    }
    if (levels.size() < 2)
    {
      throw DataError("design matrix is rank deficient: factor '" + factor.name +
                      "' has a single level, collinear with the intercept");
    }
    std::string const reference = factor.reference.empty() ? *levels.begin() : factor.reference;
    for (auto const &level : levels)
    {
      if (level != reference)
      {
        indicators.push_back({f, level, factor.name + "[T." + level + "]"});
      }
    }
  }

  std::vector<std::string> columns{"Intercept"};
  for (auto const &ind : indicators)
  {
    columns.push_back(ind.name);
  }
  columns.insert(columns.end(), {"train_error", "lamb", "hdisc"});
  if (spec.hdisc_interactions)
  {
    for (auto const &ind : indicators)
    {
      columns.push_back(ind.name + ":hdisc");
    }
  }
  if (spec.quadratic_terms)
  {
    columns.insert(columns.end(),
                   {"hdisc:train_error", "np.power(hdisc, 2)", "train_error:np.power(hdisc, 2)",
                    "lamb:train_error", "np.power(lamb, 2)", "train_error:np.power(lamb, 2)"});
  }

  if (records.size() < columns.size() + 1)
  {
    throw DataError("design needs at least " + std::to_string(columns.size() + 1) +
                    " successful records, got " + std::to_string(records.size()));
  }

  Design design{Eigen::MatrixXd(static_cast<Eigen::Index>(records.size()),
                                static_cast<Eigen::Index>(columns.size())),
                Eigen::VectorXd(static_cast<Eigen::Index>(records.size())), columns};
  for (std::size_t i = 0; i < records.size(); ++i)
  {
    auto const &r     = *records[i];
    double const te   = r.train_error;
    double const lamb = r.adaptability_upper;
    double const hd   = r.stats.hdisc;

    std::vector<double> row{1.0};
    std::vector<double> dummies;
    for (auto const &ind : indicators)
    {
      dummies.push_back(level_of(r, spec.categorical[ind.factor]) == ind.level ? 1.0 : 0.0);
    }
    row.insert(row.end(), dummies.begin(), dummies.end());
    row.insert(row.end(), {te, lamb, hd});
    if (spec.hdisc_interactions)
    {
      for (double v : dummies)
      {
        row.push_back(v * hd);
      }
    }
    if (spec.quadratic_terms)
    {
      row.insert(row.end(), {hd * te, hd * hd, te * hd * hd, lamb * te, lamb * lamb, te * lamb * lamb});
    }
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      design.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
    design.y(static_cast<Eigen::Index>(i)) = hd - r.error_gap;
  }

  check_rank(design.x, design.columns);
  return design;
}

double OlsFit::coefficient(std::string_view column) const
{
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end())
  {
    throw DataError("fit has no column '" + std::string(column) + "'");
  }
  return coefficients(std::distance(columns.begin(), it));
}

OlsFit ols_fit(Eigen::MatrixXd const &x, Eigen::VectorXd const &y, std::vector<std::string> columns)
{
  if (x.rows() != y.size())
  {
    throw DataError("design has " + std::to_string(x.rows()) + " rows but response has " +
                    std::to_string(y.size()));
  }
  if (x.rows() <= x.cols())
  {
    throw DataError("OLS needs more rows than columns");
  }
  if (!x.allFinite() || !y.allFinite())
  {
    throw DataError("OLS input contains non-finite entries");
  }
  if (columns.empty())
  {
    for (Eigen::Index c = 0; c < x.cols(); ++c)
    {
      columns.push_back("x" + std::to_string(c));
    }
  }
  if (columns.size() != static_cast<std::size_t>(x.cols()))
  {
    throw DataError("column names do not match design width");
  }
  check_rank(x, columns);

  OlsFit fit;
  fit.columns      = std::move(columns);
  fit.coefficients = x.colPivHouseholderQr().solve(y);
  fit.residuals    = y - x * fit.coefficients;
  fit.x            = x;

  double const ssr = fit.residuals.squaredNorm();
  double const sst = (y.array() - y.mean()).matrix().squaredNorm();
  fit.r_squared    = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  bool intercept   = false;
  for (Eigen::Index c = 0; c < x.cols(); ++c)
  {
    intercept = intercept || (x.col(c).array() == 1.0).all();
  }
  if (intercept)
  {
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  }
  return fit;
}

double contrast_estimation_error(OlsFit const &fit, std::span<double const> x_base, double delta)
{
  if (!(delta > 0.0))
  {
    throw DataError("contrast step delta must be positive");
  }
  if (x_base.size() != fit.columns.size())
  {
    throw DataError("base feature row does not match the fit's columns");
  }
  auto index = [&fit](std::string_view name) {
    auto it = std::find(fit.columns.begin(), fit.columns.end(), name);
    if (it == fit.columns.end())
    {
      throw DataError("fit lacks column '" + std::string(name) + "' needed for the contrast");
    }
    return static_cast<std::size_t>(std::distance(fit.columns.begin(), it));
  };
  auto const j = index("hdisc");
  auto const k = index("train_error");
  auto const l = index("hdisc:train_error");
  auto const q = index("np.power(hdisc, 2)");
  auto const r = index("train_error:np.power(hdisc, 2)");

  auto const   beta = [&fit](std::size_t c) { return fit.coefficients(static_cast<Eigen::Index>(c)); };
  double const xj   = x_base[j];
  double const xk   = x_base[k];
  return beta(j) * delta + beta(l) * delta * xk + beta(q) * (delta * delta + 2.0 * delta * xj) +
         beta(r) * (delta * delta * xk + 2.0 * delta * xj * xk);
}

double contrast_error_gap(OlsFit const &fit, std::string_view category, double d_value)
{
  return -(fit.coefficient(category) + fit.coefficient(std::string(category) + ":hdisc") * d_value);
}

JarqueBera jarque_bera(std::span<double const> residuals)
{
  if (residuals.size() < 8)
  {
    throw DataError("Jarque-Bera needs at least 8 residuals");
  }
  auto const   n    = static_cast<double>(residuals.size());
  double const mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / n;
  double       m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double r : residuals)
  {
    double const d  = r - mean;
    double const d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0))
  {
    throw DataError("Jarque-Bera undefined for zero-variance residuals");
  }
  double const skew     = m3 / std::pow(m2, 1.5);
  double const kurtosis = m4 / (m2 * m2);
  double const excess   = kurtosis - 3.0;
  double const jb       = n / 6.0 * (skew * skew + excess * excess / 4.0);
  return {jb, std::exp(-jb / 2.0), skew, kurtosis};
}

Diagnostics diagnostics(OlsFit const &fit)
{
  std::span<double const> const res(fit.residuals.data(), static_cast<std::size_t>(fit.residuals.size()));
  auto const                    n = res.size();

  Diagnostics out{};
  out.mean_residual = fit.residuals.mean();
  out.r_squared     = fit.r_squared;
  double const spread = res.empty() ? 0.0 : fit.residuals.maxCoeff() - fit.residuals.minCoeff();
  if (n >= 8 && spread > 0.0)
  {
    out.jb = jarque_bera(res);
  }

  std::vector<double> sorted(res.begin(), res.end());
  std::sort(sorted.begin(), sorted.end());
  double const sd = std::sqrt((fit.residuals.array() - out.mean_residual).square().sum() /
                              static_cast<double>(n));
  boost::math::normal const normal(out.mean_residual, sd > 0.0 ? sd : 1.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    double const p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.qq.emplace_back(boost::math::quantile(normal, p), sorted[i]);
  }

  // Sturges' rule.
  auto const   bins = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  double const lo   = sorted.front();
  double const hi   = sorted.back();
  double const width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  for (std::size_t b = 0; b <= bins; ++b)
  {
    out.histogram_edges.push_back(lo + width * static_cast<double>(b));
  }
  out.histogram_counts.assign(bins, 0);
  for (double r : sorted)
  {
    auto b = static_cast<std::size_t>((r - lo) / width);
    out.histogram_counts[std::min(b, bins - 1)] += 1;
  }

  for (Eigen::Index c = 0; c < fit.x.cols(); ++c)
  {
    auto const &name = fit.columns[static_cast<std::size_t>(c)];
    if (name == "Intercept")
    {
      continue;
    }
    ResidualSeries s{name, {}, {}};
    for (Eigen::Index i = 0; i < fit.x.rows(); ++i)
    {
      s.values.push_back(fit.x(i, c));
      s.residuals.push_back(fit.residuals(i));
    }
    out.series.push_back(std::move(s));
  }
  return out;
}

}  // namespace shiftdiag
