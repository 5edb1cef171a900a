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

#include "shiftdiag/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "shiftdiag/error.hpp"

namespace shiftdiag {

namespace {

template <typename T>
Json optional_json(std::optional<T> const &v)
{
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(Json const &j, char const *key)
{
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
  {
    return std::nullopt;
  }
  return it->template get<T>();
}

Json vector_json(Eigen::VectorXd const &v)
{
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    out.push_back(v(i));
  }
  return out;
}

}  // namespace

std::string hex_hash(std::uint64_t hash)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json to_json(ExperimentRecord const &r)
{
  Json j;
  j["id"]     = r.id;
  j["source"] = r.source;
  j["target"] = r.target;
  j["kind"]   = r.kind;
  j["seed"]   = r.seed;
  j["stats"]  = {{"frs", r.stats.frs},
                 {"energy", r.stats.energy},
                 {"mmd", r.stats.mmd},
                 {"bbsd", r.stats.bbsd},
                 {"hdisc", r.stats.hdisc}};
  j["train_error"]        = r.train_error;
  j["target_error"]       = r.target_error;
  j["error_gap"]          = r.error_gap;
  j["adaptability_upper"] = r.adaptability_upper;
  j["tags"]               = Json::object();
  for (auto const &[k, v] : r.tags)
  {
    j["tags"][k] = v;
  }
  if (r.error)
  {
    j["error"] = *r.error;
  }
  return j;
}

ExperimentRecord record_from_json(Json const &j)
{
  try
  {
    ExperimentRecord r;
    r.id                 = j.value("id", std::string{});
    r.source             = j.at("source").get<std::string>();
    r.target             = j.at("target").get<std::string>();
    r.kind               = j.at("kind").get<std::string>();
    r.seed               = j.at("seed").get<std::uint64_t>();
    auto const &s        = j.at("stats");
    r.stats              = {s.at("frs").get<double>(), s.at("energy").get<double>(),
                            s.at("mmd").get<double>(), s.at("bbsd").get<double>(),
                            s.at("hdisc").get<double>()};
    r.train_error        = j.at("train_error").get<double>();
    r.target_error       = j.at("target_error").get<double>();
    r.error_gap          = j.at("error_gap").get<double>();
    r.adaptability_upper = j.at("adaptability_upper").get<double>();
    for (auto const &[k, v] : j.at("tags").items())
    {
      r.tags[k] = v.get<std::string>();
    }
    r.error = optional_from<std::string>(j, "error");
    return r;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw DataError(std::string("bad record: ") + e.what());
  }
}

Json records_report(std::span<ExperimentRecord const> records, std::uint64_t manifest_hash)
{
  Json j;
  j["version"]       = kToolVersion;
  j["manifest_hash"] = hex_hash(manifest_hash);
  j["records"]       = Json::array();
  for (auto const &r : records)
  {
    j["records"].push_back(to_json(r));
  }
  return j;
}

RecordsReport parse_records_report(Json const &j)
{
  RecordsReport out;
  try
  {
    out.version       = j.at("version").get<std::string>();
    out.manifest_hash = j.at("manifest_hash").get<std::string>();
    for (auto const &r : j.at("records"))
    {
      out.records.push_back(record_from_json(r));
    }
  }
  catch (nlohmann::json::exception const &e)
  {
    throw DataError(std::string("bad records report: ") + e.what());
  }
  return out;
}

RecordsReport load_records(std::filesystem::path const &path)
{
  return parse_records_report(read_json(path));
}

Json to_json(CorrelationTable const &table)
{
  Json j;
  j["version"] = kToolVersion;
  j["subsets"] = Json::array();
  for (auto const &s : table.subsets)
  {
    Json row;
    row["name"]  = s.name;
    row["count"] = s.count;
    row["cells"] = Json::array();
    for (auto const &c : s.cells)
    {
      row["cells"].push_back({{"statistic", c.statistic},
                              {"spearman", optional_json(c.spearman)},
                              {"pearson", optional_json(c.pearson)},
                              {"error", optional_json(c.error)}});
    }
    row["steiger"] = Json::array();
    for (auto const &c : s.steiger)
    {
      row["steiger"].push_back({{"method", c.method},
                                {"other", c.other},
                                {"z", optional_json(c.z)},
                                {"p_value", optional_json(c.p_value)},
                                {"error", optional_json(c.error)}});
    }
    j["subsets"].push_back(std::move(row));
  }
  return j;
}

Json to_json(OlsFit const &fit)
{
  Json j;
  j["version"]      = kToolVersion;
  j["n"]            = fit.residuals.size();
  j["r_squared"]    = fit.r_squared;
  j["coefficients"] = Json::object();
  for (std::size_t i = 0; i < fit.columns.size(); ++i)
  {
    j["coefficients"][fit.columns[i]] = fit.coefficients(static_cast<Eigen::Index>(i));
  }
  j["residuals"] = vector_json(fit.residuals);
  return j;
}

Json to_json(Diagnostics const &d)
{
  Json j;
  j["mean_residual"] = d.mean_residual;
  j["r_squared"]     = d.r_squared;
  j["jarque_bera"]   = nullptr;
  if (d.jb)
  {
    j["jarque_bera"] = {{"statistic", d.jb->statistic},
                        {"p_value", d.jb->p_value},
                        {"skew", d.jb->skew},
                        {"kurtosis", d.jb->kurtosis}};
  }
  j["qq"]            = Json::array();
  for (auto const &[theory, sample] : d.qq)
  {
    j["qq"].push_back({theory, sample});
  }
  j["histogram"] = {{"edges", d.histogram_edges}, {"counts", d.histogram_counts}};
  j["series"]    = Json::array();
  for (auto const &s : d.series)
  {
    j["series"].push_back(
        {{"feature", s.feature}, {"values", s.values}, {"residuals", s.residuals}});
  }
  return j;
}

Diagnostics diagnostics_from_json(Json const &j)
{
  try
  {
    Diagnostics d;
    d.mean_residual = j.at("mean_residual").get<double>();
    d.r_squared     = j.at("r_squared").get<double>();
    if (auto const &jb = j.at("jarque_bera"); !jb.is_null())
    {
      d.jb = JarqueBera{jb.at("statistic").get<double>(), jb.at("p_value").get<double>(),
                        jb.at("skew").get<double>(), jb.at("kurtosis").get<double>()};
    }
    for (auto const &q : j.at("qq"))
    {
      d.qq.emplace_back(q.at(0).get<double>(), q.at(1).get<double>());
    }
    d.histogram_edges  = j.at("histogram").at("edges").get<std::vector<double>>();
    d.histogram_counts = j.at("histogram").at("counts").get<std::vector<std::size_t>>();
    for (auto const &s : j.at("series"))
    {
      d.series.push_back({s.at("feature").get<std::string>(),
                          s.at("values").get<std::vector<double>>(),
                          s.at("residuals").get<std::vector<double>>()});
    }
    return d;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw DataError(std::string("bad diagnostics report: ") + e.what());
  }
}

DesignSpec design_spec_from_json(Json const &j)
{
  try
  {
    DesignSpec spec = j.value("standard", false) ? DesignSpec::standard() : DesignSpec{};
    if (auto it = j.find("categorical"); it != j.end())
    {
      spec.categorical.clear();
      for (auto const &c : *it)
      {
        spec.categorical.push_back({c.at("name").get<std::string>(),
                                    c.at("source").get<std::string>(),
                                    c.value("reference", std::string{})});
      }
    }
    spec.hdisc_interactions = j.value("hdisc_interactions", spec.hdisc_interactions);
    spec.quadratic_terms    = j.value("quadratic_terms", spec.quadratic_terms);
    return spec;
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ConfigError(std::string("bad design spec: ") + e.what());
  }
}

std::string dump(Json const &j) { return j.dump(2) + "\n"; }

void write_json(std::filesystem::path const &path, Json const &j)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << dump(j)) || !out.flush())
    {
      throw Error("cannot write " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot write " + path.string());
  }
}

Json read_json(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw DataError("cannot open " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try
  {
    return Json::parse(buf.str());
  }
  catch (nlohmann::json::exception const &e)
  {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace shiftdiag
