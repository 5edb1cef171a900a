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

// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails, except those named with --known-failure N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <set>
#include <string_view>
#include <sys/wait.h>

#include "oracles.hpp"
#include "shiftdiag/correlation.hpp"
#include "shiftdiag/discrepancy.hpp"
#include "shiftdiag/error.hpp"
#include "shiftdiag/harness.hpp"
#include "shiftdiag/regression.hpp"
#include "shiftdiag/report.hpp"
#include "shiftdiag/twosample.hpp"
#include "support.hpp"

using namespace shiftdiag;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome
{
  bool        pass;
  std::string detail;
};

LabeledDataset labeled(std::vector<double> const &x, std::vector<int> const &y)
{
  Matrix m(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    m(static_cast<Eigen::Index>(i), 0) = x[i];
  }
  return {std::move(m), y, 2};
}

Outcome sandwich()
{
  auto const start = Clock::now();
  Rng        rng(1);
  double     worst = 1.0;
  for (int trial = 0; trial < 1000; ++trial)
  {
    auto const          n = 1 + rng.uniform_below(8);
    auto const          m = 1 + rng.uniform_below(8);
    std::vector<double> sx(n), tx(m);
    std::vector<int>    sy(n), ty(m);
    for (std::size_t i = 0; i < n; ++i)
    {
      sx[i] = rng.normal();
      sy[i] = static_cast<int>(rng.uniform_below(2));
    }
    for (std::size_t i = 0; i < m; ++i)
    {
      tx[i] = rng.normal() + rng.uniform(-1.0, 1.0);
      ty[i] = static_cast<int>(rng.uniform_below(2));
    }
    oracle::Threshold const h{rng.uniform(-2.0, 2.0), rng.uniform_below(2) ? 1 : -1};
    std::vector<Classifier> list{oracle::as_classifier(h)};
    auto const              extra = rng.uniform_below(20);
    for (std::uint64_t k = 0; k < extra; ++k)
    {
      list.push_back(oracle::as_classifier({rng.uniform(-2.0, 2.0), rng.uniform_below(2) ? 1 : -1}));
    }
    auto const cert = certify_bound(oracle::as_classifier(h), labeled(sx, sy), labeled(tx, ty), list);
    worst           = std::min(worst, cert.slack);
  }
  double const took = seconds_since(start);
  std::ostringstream os;
  os << "min slack " << worst << ", " << took << " s";
  return {worst >= -1e-12 && took < 10.0, os.str()};
}

Outcome statistic_oracles()
{
  auto const start = Clock::now();
  Rng        rng(2);
  double     worst = 0.0;
  for (int trial = 0; trial < 200; ++trial)
  {
    auto const n     = 2 + rng.uniform_below(7);
    auto const m     = 2 + rng.uniform_below(9 - n);
    auto const d     = 1 + rng.uniform_below(4);
    Matrix     sx    = testing::random_matrix(n, d, rng);
    Matrix     tx    = testing::random_matrix(m, d, rng, 2.0);
    double     sigma = rng.uniform(0.3, 3.0);
    worst = std::max({worst, std::abs(frs_statistic(sx, tx).value - oracle::frs(sx, tx)),
                      std::abs(energy_statistic(sx, tx).value - oracle::energy(sx, tx)),
                      std::abs(mmd_statistic(sx, tx, sigma).value - oracle::mmd(sx, tx, sigma))});
  }
  double const took = seconds_since(start);
  std::ostringstream os;
  os << "max deviation " << worst << ", " << took << " s";
  return {worst <= 1e-10 && took < 5.0, os.str()};
}

struct ScenarioMeans
{
  double gap{0}, energy{0}, mmd{0}, hdisc{0}, lambda{0};
};

Outcome scenario_sweep()
{
  auto const start = Clock::now();
  Manifest   m;
  for (auto kind : {ScenarioKind::A, ScenarioKind::B, ScenarioKind::C})
  {
    PairEntry p;
    p.id       = "synth-" + to_string(kind);
    p.setup    = Setup::synthetic;
    p.scenario = kind;
    p.n        = 400;
    m.pairs.push_back(p);
  }
  m.classifiers = {ModelKind::linear};
  m.seeds       = {0, 1, 2, 3, 4};
  auto const res = run_experiments(m);
  if (res.failures != 0)
  {
    return {false, "sweep had failing records"};
  }

  std::map<std::string, ScenarioMeans> means;
  std::vector<double>                  gap, energies;
  std::map<std::string, std::vector<double>> stat;
  for (auto const &r : res.records)
  {
    auto &s = means[r.tags.at("scenario")];
    s.gap += r.error_gap / 5;
    s.energy += r.stats.energy / 5;
    s.mmd += r.stats.mmd / 5;
    s.hdisc += r.stats.hdisc / 5;
    s.lambda += r.adaptability_upper / 5;
    gap.push_back(r.error_gap);
    energies.push_back(r.stats.energy);
    for (auto const &name : statistic_names())
    {
      stat[name].push_back(statistic_value(r.stats, name));
    }
  }
  auto const &a = means["A"];
  auto const &b = means["B"];
  auto const &c = means["C"];

  auto const above = std::count_if(energies.begin(), energies.end(),
                                   [&](double e) { return e > a.energy; });
  bool const a_ok  = a.gap < 0.1 && 3 * static_cast<std::size_t>(above) < energies.size();
  bool const b_ok  = std::abs(b.energy) < std::abs(a.energy) && std::abs(b.mmd) < std::abs(a.mmd) &&
                    b.gap > 0.5 && b.lambda > 0.5;
  bool const c_ok  = c.hdisc > 0.5 && c.gap > 0.3;

  double const hdisc_r = pearson(stat["hdisc"], gap);
  bool         corr_ok = true;
  std::ostringstream os;
  os << "A gap " << a.gap << " energy " << a.energy << (a_ok ? " ok" : " FAIL") << "; B gap " << b.gap
     << " lambda " << b.lambda << " energy " << b.energy << " mmd " << b.mmd << (b_ok ? " ok" : " FAIL")
     << "; C hdisc " << c.hdisc << " gap " << c.gap << (c_ok ? " ok" : " FAIL") << "; pearson hdisc "
     << hdisc_r;
  for (auto const *name : {"frs", "energy", "mmd", "bbsd"})
  {
    double const r = pearson(stat[name], gap);
    os << " " << name << " " << r;
    corr_ok = corr_ok && hdisc_r > r;
  }
  double const took = seconds_since(start);
  os << (corr_ok ? " ok" : " FAIL") << "; " << took << " s";
  return {a_ok && b_ok && c_ok && corr_ok && took < 300.0, os.str()};
}

Outcome training_recipe()
{
  auto const start = Clock::now();
  double     worst = 0.0;
  for (auto kind : {ModelKind::linear, ModelKind::fcn})
  {
    for (std::uint64_t seed : {0, 1, 2})
    {
      auto const  ds = testing::separable(500, 100 + seed);
      TrainConfig cfg;
      cfg.seed = seed;
      worst    = std::max(worst, empirical_risk(train(ds, kind, cfg), ds));
    }
  }
  double const took = seconds_since(start);
  std::ostringstream os;
  os << "worst training error " << worst << ", " << took << " s";
  return {worst < 5e-4 && took < 60.0, os.str()};
}

Outcome gradient_check()
{
  Rng    rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial)
  {
    auto const       d    = 1 + rng.uniform_below(5);
    auto const       k    = 2 + rng.uniform_below(3);
    auto const       kind = trial % 2 ? ModelKind::fcn : ModelKind::linear;
    auto const       h    = Classifier::initialize(kind, d, k, 1 + rng.uniform_below(8), rng);
    Matrix           xs   = testing::random_matrix(8, d, rng);
    std::vector<int> y(8);
    for (auto &v : y)
    {
      v = static_cast<int>(rng.uniform_below(k));
    }
    std::vector<Layer> grad;
    h.nll_gradient(xs, y, grad);
    worst = std::max(worst, oracle::gradient_error(Classifier(kind, grad).parameters(),
                                                   oracle::numeric_gradient(h, xs, y)));
  }
  std::ostringstream os;
  os << "worst relative error " << worst;
  return {worst <= 1e-4, os.str()};
}

Eigen::MatrixXd random_design(Eigen::Index rows, Eigen::Index cols, Rng &rng)
{
  Eigen::MatrixXd x(rows, cols);
  x.col(0).setOnes();
  for (Eigen::Index i = 0; i < rows; ++i)
  {
    for (Eigen::Index j = 1; j < cols; ++j)
    {
      x(i, j) = rng.normal();
    }
  }
  return x;
}

Outcome ols_suite()
{
  Rng  rng(6);
  bool exact = true, orthogonal = true, unbiased = true, contrasts = true;

  for (int trial = 0; trial < 50; ++trial)
  {
    auto const      rows = static_cast<Eigen::Index>(8 + rng.uniform_below(40));
    auto const      cols = static_cast<Eigen::Index>(2 + rng.uniform_below(5));
    auto const      x    = random_design(rows, cols, rng);
    Eigen::VectorXd beta(cols);
    for (auto &v : beta)
    {
      v = rng.uniform(-3.0, 3.0);
    }
    Eigen::VectorXd const y = x * beta;
    exact = exact && (ols_fit(x, y).coefficients - beta).cwiseAbs().maxCoeff() <= 1e-10;

    Eigen::VectorXd noisy(rows);
    for (auto &v : noisy)
    {
      v = rng.normal() * (1 + trial);
    }
    auto const fit = ols_fit(x, noisy);
    orthogonal = orthogonal && (x.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-8 * noisy.norm();
  }

  auto const      x = random_design(40, 4, rng);
  Eigen::VectorXd beta(4);
  beta << 1.0, -2.0, 0.5, 0.0;
  double const    sigma = 0.5;
  Eigen::VectorXd mean  = Eigen::VectorXd::Zero(4);
  for (std::uint64_t s = 0; s < 200; ++s)
  {
    Rng             noise(5000 + s);
    Eigen::VectorXd y = x * beta;
    for (auto &v : y)
    {
      v += sigma * noise.normal();
    }
    mean += ols_fit(x, y).coefficients / 200.0;
  }
  Eigen::MatrixXd const cov = (x.transpose() * x).inverse() * sigma * sigma;
  for (Eigen::Index j = 0; j < 4; ++j)
  {
    unbiased = unbiased && std::abs(mean(j) - beta(j)) < 3.0 * std::sqrt(cov(j, j) / 200.0);
  }

  OlsFit table;
  table.columns      = {"Intercept", "bert[T.sentence]", "hdisc", "bert[T.sentence]:hdisc"};
  table.coefficients = Eigen::Vector4d(0.1, 0.025, 0.3, -0.137);
  double const v     = contrast_error_gap(table, "bert[T.sentence]", 0.5);
  contrasts          = v == -(0.025 + (-0.137) * 0.5) && std::abs(v - 0.0435) <= 1e-15;

  OlsFit est;
  est.columns = {"Intercept", "train_error", "hdisc", "hdisc:train_error", "np.power(hdisc, 2)",
                 "train_error:np.power(hdisc, 2)"};
  est.coefficients.resize(6);
  est.coefficients << 0.0, 0.0, 1.5, 2.0, -1.0, 3.0;
  std::vector<double> const base{1.0, 0.3, 0.2, 0.06, 0.04, 0.012};
  double const              d    = 0.25;
  double const hand = 1.5 * d + 2.0 * d * 0.3 - 1.0 * (d * d + 2 * d * 0.2) +
                      3.0 * (d * d * 0.3 + 2 * d * 0.2 * 0.3);
  contrasts = contrasts && std::abs(contrast_estimation_error(est, base, d) - hand) <= 1e-14;

  std::ostringstream os;
  os << "exact " << exact << ", orthogonal " << orthogonal << ", unbiased " << unbiased
     << ", contrast " << v;
  return {exact && orthogonal && unbiased && contrasts, os.str()};
}

Outcome correlation_suite()
{
  Rng  rng(7);
  bool affine = true, monotone = true, steiger = true;
  for (int trial = 0; trial < 200; ++trial)
  {
    auto const          n = 3 + rng.uniform_below(40);
    std::vector<double> x(n), y(n), ax(n), mx(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      x[i] = rng.normal();
      y[i] = x[i] + rng.normal();
    }
    double const a = rng.uniform(0.1, 10.0);
    double const b = rng.uniform(-5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i)
    {
      ax[i] = a * x[i] + b;
      mx[i] = std::exp(x[i]) + x[i] * x[i] * x[i];
    }
    affine   = affine && std::abs(pearson(ax, y) - pearson(x, y)) <= 1e-12;
    monotone = monotone && spearman(mx, y) == spearman(x, y);

    double const r = rng.uniform(-0.9, 0.9);
    double const c = rng.uniform(-0.9, 0.9);
    if (1 - 2 * r * r - c * c + 2 * r * r * c > 0)
    {
      auto const s = steiger_test(r, r, c, 4 + rng.uniform_below(1000));
      steiger      = steiger && s.z == 0.0 && s.p_value == 1.0;
    }
  }
  double const derived = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
  bool const   closed  = std::abs(derived - 9.0 / std::sqrt(84.0)) <= 1e-12;
  std::ostringstream os;
  os << "affine " << affine << ", monotone " << monotone << ", steiger " << steiger << ", 9/sqrt(84) "
     << closed;
  return {affine && monotone && steiger && closed, os.str()};
}

int cli(std::string const &args)
{
  std::string const cmd    = std::string(SHIFTDIAG_CLI) + " " + args + " > /dev/null 2>&1";
  int const         status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome cli_determinism()
{
  testing::TempDir dir("acceptance-cli");
  auto             q = [](std::filesystem::path const &p) { return "'" + p.string() + "'"; };
  if (cli("synth --kind C --n 120 --seed 4 --out " + q(dir.path())) != 0)
  {
    return {false, "synth failed"};
  }
  auto const src = q(dir / "source.csv");
  auto const tgt = q(dir / "target.csv");
  testing::write_text(dir / "manifest.json", R"({
    "datasets": [{"name": "s", "path": "source.csv", "tags": {"group": "x"}},
                 {"name": "t", "path": "target.csv", "tags": {"group": "y"}}],
    "pairs": [{"id": "s", "source": "s"}, {"id": "st", "source": "s", "target": "t"},
              {"id": "ts", "source": "t", "target": "s"},
              {"id": "synth", "setup": "synthetic", "scenario": "A", "n": 80}],
    "classifiers": ["linear"],
    "seeds": [0, 1]
  })");
  testing::write_text(dir / "design.json", R"({"categorical": [{"name": "dist", "source": "distribution"}],
                                               "quadratic_terms": false})");

  std::vector<std::pair<std::string, std::string>> const commands{
      {"synth", "synth --kind B --n 50 --seed 9 --out " + q(dir / "synth@")},
      {"stats", "stats " + src + " " + tgt + " --seed 3 --out " + q(dir / "stats@.json")},
      {"train", "train " + src + " --seed 3 --model " + q(dir / "model@.json")},
      {"certify", "certify " + src + " " + tgt + " --seed 3 --out " + q(dir / "cert@.json")},
      {"experiment", "experiment " + q(dir / "manifest.json") + " --out " + q(dir / "records@.json")},
      {"correlate", "correlate " + q(dir / "records1.json") + " --subsets all,distribution=OOD --out " +
                        q(dir / "corr@.json")},
      {"regress", "regress " + q(dir / "records1.json") + " " + q(dir / "design.json") + " --out " +
                      q(dir / "fit@.json")}};

  std::vector<std::string> files{"synth@/source.csv", "synth@/target.csv", "stats@.json",
                                 "model@.json",       "cert@.json",        "records@.json",
                                 "corr@.json",        "fit@.json"};
  for (auto const &[name, args] : commands)
  {
    for (char run : {'1', '2'})
    {
      auto expanded = args;
      expanded.replace(expanded.find('@'), 1, 1, run);
      if (int const code = cli(expanded); code != 0)
      {
        return {false, name + " exited with " + std::to_string(code)};
      }
    }
  }
  for (auto const &f : files)
  {
    auto one = f, two = f;
    one.replace(one.find('@'), 1, 1, '1');
    two.replace(two.find('@'), 1, 1, '2');
    auto const a = testing::read_text(dir.path() / one);
    if (a.empty() || a != testing::read_text(dir.path() / two))
    {
      return {false, f + " differs between runs"};
    }
  }
  return {true, std::to_string(files.size()) + " report files byte-identical across 7 commands"};
}

}  // namespace

int main(int argc, char **argv)
{
  std::set<std::size_t> known;
  for (int i = 1; i < argc; ++i)
  {
    if (std::string_view(argv[i]) == "--known-failure" && i + 1 < argc)
    {
      known.insert(std::stoul(argv[++i]));
    }
    else
    {
      std::cerr << "usage: acceptance [--known-failure N]...\n";
      return 2;
    }
  }

  std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
      {"1 error-gap sandwich", sandwich},
      {"2 statistic oracles", statistic_oracles},
      {"3 scenario sweep", scenario_sweep},
      {"4 training recipe", training_recipe},
      {"5 gradient check", gradient_check},
      {"6 OLS suite", ols_suite},
      {"7 correlation suite", correlation_suite},
      {"8 CLI determinism", cli_determinism}};

  int failed = 0, tolerated = 0;
  for (std::size_t index = 0; index < criteria.size(); ++index)
  {
    auto const &[name, check] = criteria[index];
    Outcome outcome;
    try
    {
      outcome = check();
    }
    catch (std::exception const &e)
    {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    bool const expected = known.contains(index + 1);
    if (!outcome.pass)
    {
      ++(expected ? tolerated : failed);
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail
              << (!outcome.pass && expected ? " [known failure]" : "") << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed + tolerated) << "/" << criteria.size()
            << " criteria passed";
  if (tolerated > 0)
  {
    std::cout << ", " << tolerated << " known failure(s)";
  }
  std::cout << std::endl;
  return failed == 0 ? 0 : 1;
}
