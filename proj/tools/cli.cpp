// Copyright 2026 The tiltsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cstdint>
#include <exception>
#include <iomanip>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tiltsearch/config.hpp"
#include "tiltsearch/demo.hpp"
#include "tiltsearch/metrics.hpp"
#include "tiltsearch/search.hpp"
#include "tiltsearch/selfcheck.hpp"
#include "tiltsearch/sweep.hpp"

namespace tiltsearch {
namespace {

struct Flags {
  std::string config;
  std::string out;
  int workers = 1;
  std::optional<std::uint64_t> seed;
  int trial = 0;
  bool no_timing = false;
};

ExperimentConfig Resolve(const Flags& flags) {
  ExperimentConfig config = flags.config.empty() ? ExperimentConfig() : LoadConfig(flags.config);
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.seed) config.master_seed = *flags.seed;
  config.Validate();
  return config;
}

int Run(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = Resolve(flags);
  const GaussianMixture prior = config.Prior();
  const DiffusionPrior dp(prior, config.Schedule());
  const TrialSpec trial = MakeTrial(TrialSeed(config.master_seed, flags.trial), prior, config.Trial());
  const RewardSpec reward = RewardForSide(trial.side, config.tau);
  const int n = config.particles.front();
  const int b = config.bases.front();
  out << Describe(trial) << "\n";
  for (Strategy strategy : config.strategies) {
    const SearchResult r = RunSearch(trial, dp, config.guidance, config.Search(strategy, n, b),
                                     reward, SearchSeed(trial.seed, n, 0), true);
    out << ToString(strategy) << " N=" << n << " B=" << b << "\n";
    out << "  t      group  mean_reward   max_reward   mean_residual\n";
    for (const StepTrace& s : r.trace) {
      if (s.group > 1 || s.t % 32 == 0) {
        out << "  " << std::setw(5) << s.t << "  " << std::setw(5) << s.group << "  "
            << std::setw(11) << s.mean_reward << "  " << std::setw(11) << s.max_reward << "  "
            << std::setw(11) << s.mean_residual << "\n";
      }
    }
    out << "  x0_star = " << r.x0_star.transpose() << "\n";
    out << "  psnr_db = " << Psnr(r.x0_star, trial.x0_true, config.Peak(), config.psnr_cap)
        << "  final_reward = " << r.final_reward << "  meas_residual = " << r.meas_residual
        << "\n";
  }
  return 0;
}

int Sweep(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = Resolve(flags);
  const std::vector<TrialResult> results =
      RunSweep(config, {.workers = flags.workers, .record_timing = !flags.no_timing});
  const std::filesystem::path dir = config.output_dir;
  WriteFileAtomic(dir / "sweep.csv", FormatSweepCsv(results));

  std::string errors;
  for (const TrialResult& r : results) {
    if (r.error) {
      errors += ToString(r.strategy) + "," + std::to_string(r.particles) + "," +
                std::to_string(r.base) + "," + std::to_string(r.trial_seed) + "," +
                std::to_string(r.rep) + ",\"" + *r.error + "\"\n";
    }
  }
  if (!errors.empty()) {
    WriteFileAtomic(dir / "errors.csv", "strategy,N,B,trial_seed,rep,error\n" + errors);
  }

  std::string summary = "strategy,N,B,count,mean_psnr_db,stddev,stderr\n";
  out << "strategy  N    B     count  mean_psnr_db  stderr\n";
  for (const SummaryRow& row :
       Aggregate(results, {GroupKey::kStrategy, GroupKey::kParticles, GroupKey::kBase})) {
    summary += ToString(*row.strategy) + "," + std::to_string(*row.particles) + "," +
               std::to_string(*row.base) + "," + std::to_string(row.count) + "," +
               std::to_string(row.mean) + "," + std::to_string(row.stddev) + "," +
               std::to_string(row.stderr_mean) + "\n";
    out << std::left << std::setw(10) << ToString(*row.strategy) << std::setw(5) << *row.particles
        << std::setw(6) << *row.base << std::setw(7) << row.count << std::setw(14) << row.mean
        << row.stderr_mean << std::right << "\n";
  }
  WriteFileAtomic(dir / "summary.csv", summary);
  out << "wrote " << (dir / "sweep.csv").string() << "\n";
  return errors.empty() ? 0 : 1;
}

int Demo(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = Resolve(flags);
  const DemoResult result = RunSideInfoDemo(config);
  WriteDemo(result, config.output_dir);
  for (const DemoCloud& cloud : result.clouds) {
    RunningStats stats;
    for (double d : cloud.rep_distances) stats.Add(d);
    out << std::left << std::setw(12) << cloud.label << std::right << " mean distance to x0 "
        << stats.mean() << " (sd " << stats.stddev() << ")\n";
  }
  out << "wrote " << config.output_dir << "/points_*.csv\n";
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward-guided particle search for diffusion inverse problems", "tiltsearch"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "Master seed (overrides master_seed)");
  };
  CLI::App* run = app.add_subcommand("run", "Run one trial and print a step trace");
  add_common(run);
  run->add_option("--trial", flags.trial, "Trial index")->check(CLI::NonNegativeNumber);
  CLI::App* sweep = app.add_subcommand("sweep", "Run the strategy x N x B sweep, write CSV");
  add_common(sweep);
  sweep->add_flag("--no-timing", flags.no_timing, "Write 0 in elapsed_ms");
  CLI::App* demo = app.add_subcommand("demo", "Side-information particle clouds");
  add_common(demo);
  CLI::App* check = app.add_subcommand("check", "Run the oracle self-test battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    if (e.get_exit_code() != static_cast<int>(CLI::ExitCodes::Success)) err << app.help();
    return 2;
  }

  try {
    if (*run) return Run(flags, out);
    if (*sweep) return Sweep(flags, out);
    if (*demo) return Demo(flags, out);
    if (*check) return RunSelfChecks(out) ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tiltsearch
