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

#include "shiftdiag/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "shiftdiag/discrepancy.hpp"
#include "shiftdiag/error.hpp"
#include "shiftdiag/report.hpp"
#include "shiftdiag/rng.hpp"
#include "shiftdiag/twosample.hpp"

namespace shiftdiag {

namespace {

using nlohmann::json;

template <typename T>
T get_or(json const &j, char const *key, T fallback)
{
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

std::map<std::string, std::string> parse_tags(json const &j)
{
  std::map<std::string, std::string> tags;
  if (auto it = j.find("tags"); it != j.end())
  {
    if (!it->is_object())
    {
      throw ConfigError("tags must be an object of strings");
    }
    for (auto const &[k, v] : it->items())
    {
      tags[k] = v.get<std::string>();
    }
  }
  return tags;
}

Setup parse_setup(std::string const &name)
{
  if (name == "single_source")
  {
    return Setup::single_source;
  }
  if (name == "multi_source")
  {
    return Setup::multi_source;
  }
  if (name == "synthetic")
  {
    return Setup::synthetic;
  }
  throw ConfigError("unknown setup '" + name + "'");
}

Phase parse_phase(json const &j, Phase fallback)
{
  return {get_or(j, "learning_rate", fallback.learning_rate), get_or(j, "epochs", fallback.epochs)};
}

TrainConfig parse_train(json const &j)
{
  TrainConfig cfg;
  cfg.momentum         = get_or(j, "momentum", cfg.momentum);
  cfg.batch_size       = get_or(j, "batch_size", cfg.batch_size);
  cfg.early_stop_error = get_or(j, "early_stop_error", cfg.early_stop_error);
  cfg.hidden_width     = get_or(j, "hidden_width", cfg.hidden_width);
  if (auto it = j.find("phase1"); it != j.end())
  {
    cfg.phase1 = parse_phase(*it, cfg.phase1);
  }
  if (auto it = j.find("phase2"); it != j.end())
  {
    cfg.phase2 = parse_phase(*it, cfg.phase2);
  }
  cfg.validate();
  return cfg;
}

std::filesystem::path resolve(std::filesystem::path const &base, std::string const &p)
{
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Manifest parse_manifest_json(json const &j, std::filesystem::path const &base_dir)
{
  Manifest m;
  for (auto const &d : j.at("datasets"))
  {
    m.datasets.push_back({d.at("name").get<std::string>(),
                          resolve(base_dir, d.at("path").get<std::string>()), parse_tags(d)});
  }
  std::set<std::string> names;
  for (auto const &d : m.datasets)
  {
    if (!names.insert(d.name).second)
    {
      throw ConfigError("duplicate dataset name '" + d.name + "'");
    }
  }
  auto require_dataset = [&names](std::string const &name) {
    if (!names.contains(name))
    {
      throw ConfigError("pair references unknown dataset '" + name + "'");
    }
  };

  std::set<std::string> ids;
  for (auto const &p : j.at("pairs"))
  {
    PairEntry pair;
    pair.id    = p.at("id").get<std::string>();
    pair.setup = parse_setup(get_or<std::string>(p, "setup", "single_source"));
    pair.tags  = parse_tags(p);
    if (pair.id.empty() || !ids.insert(pair.id).second)
    {
      throw ConfigError("pair ids must be non-empty and unique ('" + pair.id + "')");
    }
    switch (pair.setup)
    {
    case Setup::single_source:
      pair.source = p.at("source").get<std::string>();
      pair.target = get_or(p, "target", pair.source);
      require_dataset(pair.source);
      require_dataset(pair.target);
      break;
    case Setup::multi_source:
      pair.domains  = p.at("domains").get<std::vector<std::string>>();
      pair.held_out = p.at("held_out").get<std::size_t>();
      if (pair.domains.size() < 2 || pair.held_out >= pair.domains.size())
      {
        throw ConfigError("pair '" + pair.id + "': need >= 2 domains and a valid held_out");
      }
      for (auto const &d : pair.domains)
      {
        require_dataset(d);
      }
      break;
    case Setup::synthetic:
      pair.scenario = parse_scenario_kind(p.at("scenario").get<std::string>());
      pair.n        = get_or<std::size_t>(p, "n", 400);
      break;
    }
    m.pairs.push_back(std::move(pair));
  }

  for (auto const &c : j.at("classifiers"))
  {
    m.classifiers.push_back(parse_model_kind(c.get<std::string>()));
  }
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (m.pairs.empty() || m.classifiers.empty() || m.seeds.empty())
  {
    throw ConfigError("manifest needs at least one pair, classifier and seed");
  }
  if (auto it = j.find("output"); it != j.end())
  {
    if (auto r = it->find("records"); r != it->end())
    {
      m.records_path = resolve(base_dir, r->get<std::string>());
    }
    if (auto l = it->find("log"); l != it->end())
    {
      m.log_path = resolve(base_dir, l->get<std::string>());
    }
  }
  if (auto it = j.find("train"); it != j.end())
  {
    m.train = parse_train(*it);
  }
  m.threads = get_or(j, "threads", 1u);
  m.hash    = fnv1a(j.dump());
  return m;
}

using Loaded = std::variant<LabeledDataset, std::string>;

LabeledDataset const &require(std::map<std::string, Loaded> const &loaded, std::string const &name)
{
  auto const &entry = loaded.at(name);
  if (auto const *err = std::get_if<std::string>(&entry))
  {
    throw DataError(*err);
  }
  return std::get<LabeledDataset>(entry);
}

struct Job
{
  PairEntry const *pair;
  ModelKind        kind;
  std::uint64_t    seed;
};

ExperimentRecord run_job(Job const &job, Manifest const &m,
                         std::map<std::string, Loaded> const &loaded,
                         std::map<std::string, std::map<std::string, std::string>> const &tags)
{
  auto const &pair       = *job.pair;
  auto const  split_seed = combine_seed(job.seed, fnv1a(pair.id));

  ExperimentRecord record;
  record.id   = pair.id + "/" + to_string(job.kind) + "/" + std::to_string(job.seed);
  record.kind = to_string(job.kind);
  record.seed = job.seed;
  std::map<std::string, std::string> record_tags;
  std::string                        distribution = "OOD";
  try
  {
    std::optional<SplitPair> sp;
    switch (pair.setup)
    {
    case Setup::single_source:
    {
      record.source = pair.source + "/first";
      record.target = pair.target + "/second";
      record_tags   = tags.at(pair.source);
      distribution  = pair.source == pair.target ? "WD" : "OOD";
      auto s        = split_half(require(loaded, pair.source), split_seed).first;
      auto t        = split_half(require(loaded, pair.target), split_seed).second;
      sp.emplace(SplitPair{s.with_tag(pair.source), t.with_tag(pair.target), split_seed,
                           Setup::single_source});
      break;
    }
    case Setup::multi_source:
    {
      std::vector<LabeledDataset> domains;
      for (std::size_t i = 0; i < pair.domains.size(); ++i)
      {
        if (i != pair.held_out)
        {
          record.source += (record.source.empty() ? "" : "+") + pair.domains[i];
        }
      }
      record.source += "/first";
      record.target = pair.domains[pair.held_out] + "/first";
      for (auto const &d : pair.domains)
      {
        domains.push_back(require(loaded, d).with_tag(d));
      }
      sp.emplace(make_multisource(domains, pair.held_out, split_seed));
      break;
    }
    case Setup::synthetic:
      record.source = "synth-" + to_string(pair.scenario) + "/source";
      record.target = "synth-" + to_string(pair.scenario) + "/target";
      record_tags["scenario"] = to_string(pair.scenario);
      sp.emplace(synth_scenario(pair.scenario, pair.n, split_seed));
      break;
    }
    auto computed   = run_pair(*sp, job.kind, composite_seed(job.seed, pair.id, job.kind), m.train);
    record.stats    = computed.stats;
    record.train_error        = computed.train_error;
    record.target_error       = computed.target_error;
    record.error_gap          = computed.error_gap;
    record.adaptability_upper = computed.adaptability_upper;
  }
  catch (std::exception const &e)
  {
    record.error = e.what();
  }
  record_tags["distribution"] = distribution;
  record_tags["setup"]        = to_string(pair.setup);
  for (auto const &[k, v] : pair.tags)
  {
    record_tags[k] = v;
  }
  record.tags = std::move(record_tags);
  return record;
}

}  // namespace

Manifest parse_manifest(std::string const &text, std::filesystem::path const &base_dir)
{
  try
  {
    return parse_manifest_json(json::parse(text), base_dir);
  }
  catch (json::exception const &e)
  {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

Manifest load_manifest(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open manifest " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

std::uint64_t composite_seed(std::uint64_t seed, std::string_view pair_id, ModelKind kind)
{
  return combine_seed(combine_seed(seed, fnv1a(pair_id)), fnv1a(to_string(kind)));
}

ExperimentRecord run_pair(SplitPair const &pair, ModelKind kind, std::uint64_t seed,
                          TrainConfig const &cfg)
{
  auto const &s  = pair.source;
  auto const &t  = pair.target;
  auto const &sx = s.features();
  auto const &tx = t.features();

  TrainConfig h_cfg = cfg;
  h_cfg.seed        = seed;
  auto const h      = train(s, kind, h_cfg);

  ExperimentRecord record;
  record.source       = s.domain_tag();
  record.target       = t.domain_tag();
  record.kind         = to_string(kind);
  record.seed         = seed;
  record.stats.frs    = frs_statistic(sx, tx).value;
  record.stats.energy = energy_statistic(sx, tx).value;
  record.stats.mmd    = mmd_statistic(sx, tx, median_bandwidth(pool(sx, tx), combine_seed(seed, 3))).value;
  record.stats.bbsd   = bbsd_statistic(h, sx, tx, combine_seed(seed, 4)).value;

  TrainConfig g_cfg   = cfg;
  g_cfg.seed          = combine_seed(seed, 1);
  record.stats.hdisc  = hdiscrepancy(h, sx, tx, kind, g_cfg).value;
  record.train_error  = empirical_risk(h, s);
  record.target_error = empirical_risk(h, t);
  record.error_gap    = std::abs(record.train_error - record.target_error);

  TrainConfig l_cfg         = cfg;
  l_cfg.seed                = combine_seed(seed, 2);
  record.adaptability_upper = adaptability(s, t, kind, l_cfg);
  return record;
}

SweepResult run_experiments(Manifest const &manifest)
{
  std::map<std::string, Loaded>                             loaded;
  std::map<std::string, std::map<std::string, std::string>> tags;
  std::set<std::string>                                     used;
  for (auto const &p : manifest.pairs)
  {
    used.insert(p.source);
    used.insert(p.target);
    used.insert(p.domains.begin(), p.domains.end());
  }
  for (auto const &d : manifest.datasets)
  {
    tags[d.name] = d.tags;
    if (!used.contains(d.name))
    {
      continue;
    }
    try
    {
      loaded.emplace(d.name, load_dataset(d.path));
    }
    catch (std::exception const &e)
    {
      loaded.emplace(d.name, std::string(e.what()));
    }
  }

  std::vector<Job> jobs;
  for (auto const &p : manifest.pairs)
  {
    for (auto kind : manifest.classifiers)
    {
      for (auto seed : manifest.seeds)
      {
        jobs.push_back({&p, kind, seed});
      }
    }
  }

  std::ofstream log;
  if (!manifest.log_path.empty())
  {
    if (manifest.log_path.has_parent_path())
    {
      std::filesystem::create_directories(manifest.log_path.parent_path());
    }
    log.open(manifest.log_path, std::ios::trunc);
    if (!log)
    {
      throw Error("cannot write " + manifest.log_path.string());
    }
  }

  std::vector<ExperimentRecord> records(jobs.size());
  std::atomic<std::size_t>      next{0};
  std::mutex                    sink;
  auto                          worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
    {
      auto record = run_job(jobs[i], manifest, loaded, tags);
      std::lock_guard lock(sink);
      if (log.is_open())
      {
        log << to_json(record).dump() << '\n' << std::flush;
      }
      records[i] = std::move(record);
    }
  };

  unsigned threads = manifest.threads == 0 ? std::thread::hardware_concurrency() : manifest.threads;
  threads          = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i)
    {
      pool.emplace_back(worker);
    }
    worker();
  }

  std::sort(records.begin(), records.end(),
            [](auto const &a, auto const &b) { return a.id < b.id; });
  SweepResult result;
  result.failures = static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](auto const &r) { return !r.ok(); }));
  result.records = std::move(records);
  if (!manifest.records_path.empty())
  {
    write_json(manifest.records_path, records_report(result.records, manifest.hash));
  }
  return result;
}

}  // namespace shiftdiag
