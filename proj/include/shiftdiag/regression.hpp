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
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiftdiag/record.hpp"

namespace shiftdiag {

/// A categorical feature, dummy coded against `reference`.
struct CategoricalFactor
{
  std::string name;       ///< column prefix, e.g. "bert"
  std::string source;     ///< "kind" or the tag key holding the level
  std::string reference;  ///< empty: lexicographically smallest observed level
};

/**
 * Columns of the estimation-error regression.
 *
 * Always: Intercept, one indicator per non-reference level of each factor,
 * train_error, lamb, hdisc. With `hdisc_interactions`, every indicator times
 * hdisc. With `quadratic_terms`: hdisc:train_error, np.power(hdisc, 2),
 * train_error:np.power(hdisc, 2), lamb:train_error, np.power(lamb, 2),
 * train_error:np.power(lamb, 2).
 */
struct DesignSpec
{
  std::vector<CategoricalFactor> categorical;
  bool                           hdisc_interactions{true};
  bool                           quadratic_terms{true};

  /// hspace (classifier kind, ref fcn), group, bert (encoding tag) and news.
  static DesignSpec standard();
};

struct Design
{
  Eigen::MatrixXd          x;
  Eigen::VectorXd          y;  ///< hdisc - error_gap per record
  std::vector<std::string> columns;
};

/// Builds X and Y from the successful records. Throws DataError on a missing
/// tag, too few records or a rank-deficient X (naming the dependent columns).
Design build_design(std::span<ExperimentRecord const> records, DesignSpec const &spec);

struct OlsFit
{
  std::vector<std::string> columns;
  Eigen::VectorXd          coefficients;
  Eigen::VectorXd          residuals;
  double                   r_squared{0.0};
  Eigen::MatrixXd          x;  ///< design the fit came from (may be empty)

  /// Coefficient of a named column; throws DataError if absent.
  double coefficient(std::string_view column) const;
};

/// Least squares through a column-pivoted Householder QR.
OlsFit ols_fit(Eigen::MatrixXd const &x, Eigen::VectorXd const &y,
               std::vector<std::string> columns = {});

/**
 * Expected change in estimation error when hdisc grows by delta at the
 * feature row x_base, all other features fixed:
 *
 *   b_j d + b_l d x_k + b_q (d^2 + 2 d x_j) + b_r (d^2 x_k + 2 d x_j x_k)
 *
 * with j = hdisc, k = train_error, l = hdisc:train_error,
 * q = np.power(hdisc, 2), r = train_error:np.power(hdisc, 2).
 */
double contrast_estimation_error(OlsFit const &fit, std::span<double const> x_base, double delta);

/// Expected change in error-gap from switching `category` on (against its
/// reference) at discrepancy d: -(b_category + b_{category:hdisc} * d).
double contrast_error_gap(OlsFit const &fit, std::string_view category, double d_value);

struct JarqueBera
{
  double statistic;
  double p_value;
  double skew;
  double kurtosis;  ///< Pearson convention: 3 for a normal
};

/// JB = N/6 (S^2 + (K - 3)^2 / 4), p from the chi-square(2) tail exp(-JB/2).
JarqueBera jarque_bera(std::span<double const> residuals);

struct ResidualSeries
{
  std::string         feature;
  std::vector<double> values;
  std::vector<double> residuals;
};

struct Diagnostics
{
  double                    mean_residual;
  double                    r_squared;
  std::optional<JarqueBera> jb;  ///< absent below 8 residuals or for constant residuals

  std::vector<std::pair<double, double>> qq;  ///< (theoretical, sample) quantiles
  std::vector<double>                    histogram_edges;
  std::vector<std::size_t>               histogram_counts;
  std::vector<ResidualSeries>            series;  ///< residuals against each design column
};

Diagnostics diagnostics(OlsFit const &fit);

}  // namespace shiftdiag
