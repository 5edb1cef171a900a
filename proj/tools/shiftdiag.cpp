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

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "shiftdiag/classifier.hpp"
#include "shiftdiag/correlation.hpp"
#include "shiftdiag/dataset.hpp"
#include "shiftdiag/discrepancy.hpp"
#include "shiftdiag/error.hpp"
#include "shiftdiag/harness.hpp"
#include "shiftdiag/regression.hpp"
#include "shiftdiag/report.hpp"
#include "shiftdiag/rng.hpp"
#include "shiftdiag/twosample.hpp"

namespace {

using namespace shiftdiag;

enum Exit
{
  ok           = 0,
  usage        = 1,
  data         = 2,
  partial      = 3,
};

void emit(Json const &j, std::string const &out)
{
  if (out.empty())
  {
    std::cout << dump(j);
  }
  else
  {
    write_json(out, j);
  }
}

struct Common
{
  std::string   kind = "linear";
  std::uint64_t seed = 0;
  std::string   out;
};

void add_common(CLI::App *cmd, Common &c, bool with_kind = true)
{
  if (with_kind)
  {
    cmd->add_option("--kind", c.kind, "classifier kind")
        ->check(CLI::IsMember({"linear", "fcn"}))
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed")->capture_default_str();
  }
  cmd->add_option("--out", c.out, "output file (default: stdout)");
}

TrainConfig seeded(std::uint64_t seed)
{
  TrainConfig cfg;
  cfg.seed = seed;
  return cfg;
}

int run_stats(std::string const &source, std::string const &target, std::string const &stat,
              Common const &c)
{
  auto const kind  = parse_model_kind(c.kind);
  auto const s     = load_dataset(source);
  Matrix const tx  = load_features(target);
  auto const &sx   = s.features();
  bool const all   = stat == "all";
  auto const wants = [&](char const *name) { return all || stat == name; };

  Json j;
  j["version"] = kToolVersion;
  j["source"]  = source;
  j["target"]  = target;
  j["kind"]    = c.kind;
  j["seed"]    = c.seed;
  Json stats   = Json::object();
  if (wants("frs"))
  {
    stats["frs"] = frs_statistic(sx, tx).value;
  }
  if (wants("energy"))
  {
    stats["energy"] = energy_statistic(sx, tx).value;
  }
  if (wants("mmd"))
  {
    auto const sigma = median_bandwidth(pool(sx, tx), c.seed);
    stats["mmd"]     = mmd_statistic(sx, tx, sigma).value;
  }
  if (wants("bbsd") || wants("hdisc"))
  {
    auto const h = train(s, kind, seeded(c.seed));
    if (wants("bbsd"))
    {
      stats["bbsd"] = bbsd_statistic(h, sx, tx, c.seed).value;
    }
    if (wants("hdisc"))
    {
      auto const d   = hdiscrepancy(h, sx, tx, kind, seeded(combine_seed(c.seed, 1)));
      stats["hdisc"] = d.value;
    }
  }
  j["stats"] = std::move(stats);
  emit(j, c.out);
  return ok;
}

int run_train(std::string const &data, std::string const &model, Common const &c)
{
  auto const ds = load_dataset(data);
  auto const h  = train(ds, parse_model_kind(c.kind), seeded(c.seed));
  save_model(h, model);
  Json j;
  j["version"]     = kToolVersion;
  j["data"]        = data;
  j["kind"]        = c.kind;
  j["seed"]        = c.seed;
  j["train_error"] = empirical_risk(h, ds);
  emit(j, c.out);
  return ok;
}

int run_experiment(std::string const &manifest_path, std::optional<unsigned> threads,
                   std::string const &out)
{
  auto manifest = load_manifest(manifest_path);
  if (threads)
  {
    manifest.threads = *threads;
  }
  if (!out.empty())
  {
    manifest.records_path = out;
  }
  auto const result = run_experiments(manifest);
  if (manifest.records_path.empty())
  {
    std::cout << dump(records_report(result.records, manifest.hash));
  }
  for (auto const &r : result.records)
  {
    if (!r.ok())
    {
      std::cerr << "record " << r.id << " failed: " << *r.error << "\n";
    }
  }
  std::cerr << result.records.size() << " records, " << result.failures << " failed\n";
  return result.failures == 0 ? ok : partial;
}

int run_correlate(std::string const &records, std::string const &subsets, bool steiger,
                  std::string const &out)
{
  auto const report = load_records(records);
  auto const spec   = parse_subsets(subsets);
  emit(to_json(correlate(report.records, spec, steiger)), out);
  return ok;
}

int run_regress(std::string const &records, std::string const &design_path, std::string const &out)
{
  auto const report = load_records(records);
  auto const spec   = design_spec_from_json(read_json(design_path));
  auto const design = build_design(report.records, spec);
  auto const fit    = ols_fit(design.x, design.y, design.columns);
  Json j;
  j["version"]     = kToolVersion;
  j["fit"]         = to_json(fit);
  j["diagnostics"] = to_json(diagnostics(fit));
  emit(j, out);
  return ok;
}

int run_synth(std::string const &kind, std::size_t n, std::uint64_t seed, std::string const &dir)
{
  auto const pair = synth_scenario(parse_scenario_kind(kind), n, seed);
  std::filesystem::create_directories(dir);
  save_dataset(pair.source, std::filesystem::path(dir) / "source.csv");
  save_dataset(pair.target, std::filesystem::path(dir) / "target.csv");
  return ok;
}

int run_certify(std::string const &source, std::string const &target, std::string const &family,
                std::string const &model, Common const &c)
{
  if (family != "thresholds")
  {
    throw ConfigError("unknown hypothesis family '" + family + "'");
  }
  auto const s = load_dataset(source);
  auto const t = load_dataset(target);
  auto const h = model.empty() ? train(s, parse_model_kind(c.kind), seeded(c.seed)) : load_model(model);
  auto const hypotheses = threshold_hypotheses(pool(s.features(), t.features()));
  auto const cert       = certify_bound(h, s, t, hypotheses);
  Json j;
  j["version"]      = kToolVersion;
  j["hypotheses"]   = hypotheses.size() + 1;
  j["error_gap"]    = cert.error_gap;
  j["adaptability"] = cert.adaptability;
  j["discrepancy"]  = cert.discrepancy;
  j["slack"]        = cert.slack;
  emit(j, c.out);
  return ok;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Domain-shift diagnostics: shift statistics, h-discrepancy, error-gap analysis"};
  app.require_subcommand(1);
  std::function<int()> action;

  Common      stats_c;
  std::string stats_src, stats_tgt, stat = "all";
  auto       *stats = app.add_subcommand("stats", "shift statistics of a source/target pair");
  stats->add_option("source", stats_src, "labeled source CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("target", stats_tgt, "target CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--stat", stat, "statistic")
      ->check(CLI::IsMember({"all", "frs", "energy", "mmd", "bbsd", "hdisc"}))
      ->capture_default_str();
  add_common(stats, stats_c);
  stats->callback([&] { action = [&] { return run_stats(stats_src, stats_tgt, stat, stats_c); }; });

  Common      train_c;
  std::string train_data, train_model;
  auto       *trn = app.add_subcommand("train", "train a classifier and save it");
  trn->add_option("data", train_data, "labeled CSV")->required()->check(CLI::ExistingFile);
  trn->add_option("--model", train_model, "model output path")->required();
  add_common(trn, train_c);
  trn->callback([&] { action = [&] { return run_train(train_data, train_model, train_c); }; });

  std::string             manifest, exp_out;
  std::optional<unsigned> threads;
  auto *exp = app.add_subcommand("experiment", "run the sweep declared by a manifest");
  exp->add_option("manifest", manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--threads", threads, "worker count (0: all cores)");
  exp->add_option("--out", exp_out, "records report (overrides the manifest)");
  exp->callback([&] { action = [&] { return run_experiment(manifest, threads, exp_out); }; });

  std::string corr_records, subsets = "all", corr_out;
  bool        no_steiger = false;
  auto       *corr = app.add_subcommand("correlate", "correlate statistics with the error gap");
  corr->add_option("records", corr_records, "records report")->required()->check(CLI::ExistingFile);
  corr->add_option("--subsets", subsets, "all and/or key=value, comma separated")
      ->capture_default_str();
  corr->add_flag("--no-steiger", no_steiger, "skip Steiger comparisons");
  corr->add_option("--out", corr_out, "output file (default: stdout)");
  corr->callback([&] {
    action = [&] { return run_correlate(corr_records, subsets, !no_steiger, corr_out); };
  });

  std::string reg_records, reg_design, reg_out;
  auto       *reg = app.add_subcommand("regress", "fit the estimation-error regression");
  reg->add_option("records", reg_records, "records report")->required()->check(CLI::ExistingFile);
  reg->add_option("design", reg_design, "design spec JSON")->required()->check(CLI::ExistingFile);
  reg->add_option("--out", reg_out, "output file (default: stdout)");
  reg->callback([&] { action = [&] { return run_regress(reg_records, reg_design, reg_out); }; });

  std::string   synth_kind, synth_dir;
  std::size_t   synth_n    = 400;
  std::uint64_t synth_seed = 0;
  auto         *syn = app.add_subcommand("synth", "write a synthetic shift scenario");
  syn->add_option("--kind", synth_kind, "scenario")->required()->check(CLI::IsMember({"A", "B", "C"}));
  syn->add_option("--n", synth_n, "rows per side")->capture_default_str();
  syn->add_option("--seed", synth_seed, "seed")->capture_default_str();
  syn->add_option("--out", synth_dir, "output directory")->required();
  syn->callback([&] { action = [&] { return run_synth(synth_kind, synth_n, synth_seed, synth_dir); }; });

  Common      cert_c;
  std::string cert_src, cert_tgt, family = "thresholds", cert_model;
  auto       *cert = app.add_subcommand("certify", "exact error-gap bound over a hypothesis family");
  cert->add_option("source", cert_src, "labeled source CSV")->required()->check(CLI::ExistingFile);
  cert->add_option("target", cert_tgt, "labeled target CSV")->required()->check(CLI::ExistingFile);
  cert->add_option("--hypotheses", family, "hypothesis family")->capture_default_str();
  cert->add_option("--model", cert_model, "saved classifier h (default: train one)");
  add_common(cert, cert_c);
  cert->callback([&] {
    action = [&] { return run_certify(cert_src, cert_tgt, family, cert_model, cert_c); };
  });

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::CallForHelp const &e)
  {
    return app.exit(e);
  }
  catch (CLI::ParseError const &e)
  {
    app.exit(e);
    return usage;
  }

  try
  {
    return action();
  }
  catch (ConfigError const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return data;
  }
}
