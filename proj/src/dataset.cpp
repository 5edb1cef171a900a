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

#include "shiftdiag/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>

#include "shiftdiag/error.hpp"
#include "shiftdiag/rng.hpp"

namespace shiftdiag {

LabeledDataset::LabeledDataset(Matrix features, std::vector<int> labels, int num_classes,
                               std::string domain_tag)
  : features_(std::move(features))
  , labels_(std::move(labels))
  , num_classes_(num_classes)
  , domain_tag_(std::move(domain_tag))
{
  if (features_.rows() < 1 || features_.cols() < 1)
  {
    throw DataError("dataset needs at least one row and one feature column");
  }
  if (static_cast<std::size_t>(features_.rows()) != labels_.size())
  {
    throw DataError("dataset has " + std::to_string(features_.rows()) + " rows but " +
                    std::to_string(labels_.size()) + " labels");
  }
  if (num_classes_ < 2)
  {
    throw DataError("num_classes must be at least 2");
  }
  for (Eigen::Index i = 0; i < features_.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < features_.cols(); ++j)
    {
      if (!std::isfinite(features_(i, j)))
      {
        throw DataError("non-finite feature at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
    }
    auto const label = labels_[static_cast<std::size_t>(i)];
    if (label < 0 || label >= num_classes_)
    {
      throw DataError("label " + std::to_string(label) + " at row " + std::to_string(i) +
                      " outside [0, " + std::to_string(num_classes_) + ")");
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<std::size_t const> rows) const
{
  Matrix           features(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    features.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(rows[i]));
    labels.push_back(labels_[rows[i]]);
  }
  return {std::move(features), std::move(labels), num_classes_, domain_tag_};
}

LabeledDataset LabeledDataset::with_tag(std::string tag) const
{
  return {features_, labels_, num_classes_, std::move(tag)};
}

std::string to_string(Setup setup)
{
  switch (setup)
  {
  case Setup::single_source:
    return "single_source";
  case Setup::multi_source:
    return "multi_source";
  case Setup::synthetic:
    return "synthetic";
  }
  return "unknown";
}

// CSV ---------------------------------------------------------------------

namespace {

struct CsvTable
{
  Matrix                          features;
  std::optional<std::vector<int>> labels;
  std::optional<int>              num_classes;
};

std::vector<std::string_view> split_commas(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t                   start = 0;
  while (true)
  {
    auto const comma = line.find(',', start);
    if (comma == std::string_view::npos)
    {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
  {
    s.remove_suffix(1);
  }
  return s;
}

std::string where(std::filesystem::path const &path, std::size_t line, std::size_t column)
{
  return path.string() + ": line " + std::to_string(line) + ", column " + std::to_string(column);
}

CsvTable read_csv(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw DataError("cannot open dataset file " + path.string());
  }

  CsvTable                   table;
  std::optional<std::size_t> dim;
  bool                       labeled = false;
  std::vector<double>        values;
  std::vector<int>           labels;
  std::string                raw;
  std::size_t                line_no = 0;
  std::size_t                rows    = 0;

  while (std::getline(in, raw))
  {
    ++line_no;
    auto const line = trim(raw);
    if (line.empty())
    {
      continue;
    }
    if (line.front() == '#')
    {
      if (dim)
      {
        continue;
      }
      auto body = trim(line.substr(1));
      if (body.starts_with("num_classes="))
      {
        body.remove_prefix(12);
        int  k   = 0;
        auto res = std::from_chars(body.data(), body.data() + body.size(), k);
        if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || k < 2)
        {
          throw DataError(path.string() + ": line " + std::to_string(line_no) +
                          ": malformed num_classes comment");
        }
        table.num_classes = k;
      }
      continue;
    }

    auto const cells = split_commas(line);
    if (!dim)
    {
      labeled            = trim(cells.back()) == "label";
      std::size_t const d = cells.size() - (labeled ? 1 : 0);
      for (std::size_t j = 0; j < d; ++j)
      {
        if (trim(cells[j]) != "f" + std::to_string(j))
        {
          throw DataError(where(path, line_no, j) + ": expected header f" + std::to_string(j));
        }
      }
      if (d == 0)
      {
        throw DataError(path.string() + ": header has no feature columns");
      }
      dim = d;
      continue;
    }

    std::size_t const expected = *dim + (labeled ? 1 : 0);
    if (cells.size() != expected)
    {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(expected));
    }
    for (std::size_t j = 0; j < *dim; ++j)
    {
      auto const cell  = trim(cells[j]);
      double     value = 0.0;
      auto       res   = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
      {
        throw DataError(where(path, line_no, j) + ": not a number: '" + std::string(cell) + "'");
      }
      if (!std::isfinite(value))
      {
        throw DataError(where(path, line_no, j) + ": non-finite value '" + std::string(cell) + "'");
      }
      values.push_back(value);
    }
    if (labeled)
    {
      auto const cell  = trim(cells[*dim]);
      long       label = 0;
      auto       res   = std::from_chars(cell.data(), cell.data() + cell.size(), label);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
      {
        throw DataError(where(path, line_no, *dim) + ": label is not an integer: '" +
                        std::string(cell) + "'");
      }
      if (label < 0 || (table.num_classes && label >= *table.num_classes) || label > 1'000'000)
      {
        throw DataError(where(path, line_no, *dim) + ": label " + std::to_string(label) +
                        " out of range");
      }
      labels.push_back(static_cast<int>(label));
    }
    ++rows;
  }

  if (!dim)
  {
    throw DataError(path.string() + ": missing header row");
  }
  if (rows == 0)
  {
    throw DataError(path.string() + ": no data rows");
  }
  table.features = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(*dim));
  if (labeled)
  {
    table.labels = std::move(labels);
  }
  return table;
}

void write_number(std::ostream &out, double value)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, res.ptr - buf);
}

void write_csv(std::filesystem::path const &path, Matrix const &features,
               std::vector<int> const *labels, int num_classes)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw DataError("cannot write " + path.string());
  }
  if (labels)
  {
    out << "# num_classes=" << num_classes << '\n';
  }
  for (Eigen::Index j = 0; j < features.cols(); ++j)
  {
    out << (j ? "," : "") << 'f' << j;
  }
  out << (labels ? ",label\n" : "\n");
  for (Eigen::Index i = 0; i < features.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < features.cols(); ++j)
    {
      if (j)
      {
        out << ',';
      }
      write_number(out, features(i, j));
    }
    if (labels)
    {
      out << ',' << (*labels)[static_cast<std::size_t>(i)];
    }
    out << '\n';
  }
  if (!out)
  {
    throw DataError("failed writing " + path.string());
  }
}

}  // namespace

LabeledDataset load_dataset(std::filesystem::path const &path)
{
  auto table = read_csv(path);
  if (!table.labels)
  {
    throw DataError(path.string() + ": no label column");
  }
  int const max_label = *std::max_element(table.labels->begin(), table.labels->end());
  // A single observed class still needs a two-class label space.
  int const k = table.num_classes.value_or(std::max(2, max_label + 1));
  return {std::move(table.features), std::move(*table.labels), k, path.stem().string()};
}

Matrix load_features(std::filesystem::path const &path)
{
  return read_csv(path).features;
}

void save_dataset(LabeledDataset const &ds, std::filesystem::path const &path)
{
  write_csv(path, ds.features(), &ds.labels(), ds.num_classes());
}

void save_features(Matrix const &features, std::filesystem::path const &path)
{
  write_csv(path, features, nullptr, 0);
}

// Splits ------------------------------------------------------------------

std::pair<LabeledDataset, LabeledDataset> split_half(LabeledDataset const &ds, std::uint64_t seed)
{
  if (ds.size() < 2)
  {
    throw DataError("split_half needs at least 2 rows");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  auto const                      half = ds.size() / 2;
  std::span<std::size_t const> const all(order);
  return {ds.subset(all.first(half)), ds.subset(all.subspan(half))};
}

LabeledDataset concatenate(std::span<LabeledDataset const> parts, std::string tag)
{
  if (parts.empty())
  {
    throw DataError("nothing to concatenate");
  }
  Eigen::Index rows = 0;
  for (auto const &p : parts)
  {
    if (p.dim() != parts.front().dim() || p.num_classes() != parts.front().num_classes())
    {
      throw DataError("cannot concatenate datasets '" + parts.front().domain_tag() + "' and '" +
                      p.domain_tag() + "': dimension or label space differs");
    }
    rows += static_cast<Eigen::Index>(p.size());
  }
  Matrix           features(rows, static_cast<Eigen::Index>(parts.front().dim()));
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (auto const &p : parts)
  {
    features.middleRows(at, static_cast<Eigen::Index>(p.size())) = p.features();
    labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    at += static_cast<Eigen::Index>(p.size());
  }
  return {std::move(features), std::move(labels), parts.front().num_classes(), std::move(tag)};
}

SplitPair make_multisource(std::span<LabeledDataset const> domains, std::size_t held_out,
                           std::uint64_t seed)
{
  if (domains.size() < 2)
  {
    throw DataError("multi-source setup needs at least 2 domains");
  }
  if (held_out >= domains.size())
  {
    throw DataError("held-out index " + std::to_string(held_out) + " out of range for " +
                    std::to_string(domains.size()) + " domains");
  }
  for (auto const &d : domains)
  {
    if (d.dim() != domains.front().dim() || d.num_classes() != domains.front().num_classes())
    {
      throw DataError("domain '" + d.domain_tag() + "' differs in dimension or label space");
    }
  }

  std::vector<LabeledDataset> sources;
  std::string                 tag;
  std::optional<LabeledDataset> target;
  for (std::size_t i = 0; i < domains.size(); ++i)
  {
    auto first = split_half(domains[i], seed).first;
    if (i == held_out)
    {
      target = std::move(first);
      continue;
    }
    tag += (tag.empty() ? "" : "+") + domains[i].domain_tag();
    sources.push_back(std::move(first));
  }
  return {concatenate(sources, tag), target->with_tag(domains[held_out].domain_tag()), seed,
          Setup::multi_source};
}

// Scenarios -----------------------------------------------------------------

ScenarioKind parse_scenario_kind(std::string_view name)
{
  if (name == "A" || name == "a")
  {
    return ScenarioKind::A;
  }
  if (name == "B" || name == "b")
  {
    return ScenarioKind::B;
  }
  if (name == "C" || name == "c")
  {
    return ScenarioKind::C;
  }
  throw ConfigError("unknown scenario kind '" + std::string(name) + "' (expected A, B or C)");
}

std::string to_string(ScenarioKind kind)
{
  switch (kind)
  {
  case ScenarioKind::A:
    return "A";
  case ScenarioKind::B:
    return "B";
  case ScenarioKind::C:
    return "C";
  }
  return "?";
}

namespace {

// Unit-variance components centred at (-2, 0) and (+2, 0); the true boundary
// is x = 0 and a point's label is the side of the boundary it was drawn on.
// Every shift has length 4. C moves at 45 degrees: a purely perpendicular
// move stacks the shifted negative cluster on the source positive cluster,
// which no linear adversary can tell apart.
constexpr double kCentre = 2.0;
constexpr double kShift  = 4.0;

struct Draw
{
  Matrix           features;
  std::vector<int> labels;
};

Draw draw_source(std::size_t n, Rng &rng)
{
  Draw draw{Matrix(static_cast<Eigen::Index>(n), 2), {}};
  draw.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    double const centre = rng.uniform_below(2) ? kCentre : -kCentre;
    double const x      = centre + rng.normal();
    double const y      = rng.normal();
    draw.features(static_cast<Eigen::Index>(i), 0) = x;
    draw.features(static_cast<Eigen::Index>(i), 1) = y;
    draw.labels.push_back(x > 0.0 ? 1 : 0);
  }
  return draw;
}

}  // namespace

SplitPair synth_scenario(ScenarioKind kind, std::size_t n, std::uint64_t seed)
{
  if (n < 20)
  {
    throw DataError("synthetic scenarios need n >= 20");
  }
  Rng  rng(seed);
  auto source = draw_source(n, rng);
  auto target = draw_source(n, rng);

  switch (kind)
  {
  case ScenarioKind::A:
    target.features.col(1).array() += kShift;
    break;
  case ScenarioKind::B:
    for (auto &label : target.labels)
    {
      label = 1 - label;
    }
    break;
  case ScenarioKind::C:
    // Labels stay those drawn before the move.
    target.features.array() += kShift / std::numbers::sqrt2;
    break;
  }

  auto const tag = "scenario-" + to_string(kind);
  return {LabeledDataset(std::move(source.features), std::move(source.labels), 2, tag + "-source"),
          LabeledDataset(std::move(target.features), std::move(target.labels), 2, tag + "-target"),
          seed, Setup::synthetic};
}

}  // namespace shiftdiag
