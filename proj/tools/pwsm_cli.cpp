// Copyright 2026 The PWSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: `run` executes a sweep config and writes result
// CSVs, `generate` writes a synthetic stream as a CSV event log, and
// `audit` replays a charge ledger against declared requirements.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwsm/bench.hpp"
#include "pwsm/ledger.hpp"
#include "pwsm/streams.hpp"

namespace {

int run_command(const std::string& config_path, bool has_seed,
                std::uint64_t seed, int jobs, bool zero_noise,
                const std::string& out_dir) {
  pwsm::ExperimentConfig config = pwsm::parse_config_file(config_path);
  if (has_seed) config.master_seed = seed;
  if (zero_noise) config.zero_noise = true;
  if (!out_dir.empty()) config.output_dir = out_dir;

  const pwsm::RunOutcome outcome = pwsm::run_experiment(config, jobs);
  std::cout << "wrote " << outcome.rows.size() << " result rows to "
            << outcome.results_path << "\n";
  std::cout << "wrote " << outcome.summary.size() << " summary rows to "
            << outcome.summary_path << "\n";
  if (!outcome.all_audits_ok) {
    std::size_t failed = 0;
    for (const pwsm::ResultRow& row : outcome.rows) {
      if (!row.audit_ok) ++failed;
    }
    std::cout << "audit: FAILED (" << failed << " of " << outcome.rows.size()
              << " cells breached a budget)\n";
    return 1;
  }
  std::cout << "audit: ok (every cell passed)\n";
  return 0;
}

int generate_command(const std::string& kind_name, std::int64_t n_users,
                     std::int64_t t_slots, std::uint64_t seed,
                     const std::string& out_path,
                     const pwsm::TlnsParams& tlns, const pwsm::SinParams& sin,
                     const pwsm::LogParams& log) {
  pwsm::DatasetSpec dataset;
  dataset.kind = pwsm::parse_stream_kind(kind_name);
  dataset.n_users = static_cast<std::uint32_t>(n_users);
  dataset.t_slots = t_slots;
  dataset.tlns = tlns;
  dataset.sin = sin;
  dataset.log = log;

  const std::vector<pwsm::SlotDatabase> slots =
      pwsm::build_stream(dataset, seed, pwsm::NoiseMode::kStochastic);
  pwsm::write_stream_csv(slots, out_path);
  std::cout << "wrote " << slots.size() << " slots x " << n_users
            << " users to " << out_path << "\n";
  return 0;
}

int audit_command(const std::string& ledger_path,
                  const std::string& requirements_path) {
  const pwsm::NamedRequirements named =
      pwsm::read_requirements_csv(requirements_path);
  const pwsm::BudgetLedger ledger = pwsm::read_ledger_csv(ledger_path, named);
  const std::vector<pwsm::BudgetViolation> violations = ledger.audit();
  for (const pwsm::BudgetViolation& v : violations) {
    std::cout << "violation: user " << named.user_names[v.user] << " window "
              << "ending at slot " << v.slot << " spends " << v.window_spend
              << " against budget " << v.budget << " (overshoot "
              << v.overshoot() << ")\n";
  }
  if (violations.empty()) {
    std::cout << "audit: ok (" << named.requirements.size() << " users, "
              << ledger.charges().size() << " charges)\n";
    return 0;
  }
  std::cout << "audit: " << violations.size() << " violation(s)\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private histogram publishing for event streams under "
      "personalized sliding-window budgets"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::uint64_t seed_override = 0;
  int jobs = 1;
  bool zero_noise = false;
  std::string out_dir;
  CLI::App* run = app.add_subcommand(
      "run", "Run a sweep config and write results.csv / summary.csv");
  run->add_option("--config", config_path, "Path to a key=value config file")
      ->required();
  CLI::Option* seed_option = run->add_option(
      "--seed", seed_override, "Override the config's master_seed");
  run->add_option("--jobs", jobs, "Worker threads for independent cells")
      ->check(CLI::Range(1, 1024));
  run->add_flag("--zero-noise", zero_noise,
                "Replace every noise draw with its zero-noise value");
  run->add_option("--out", out_dir, "Override the config's output_dir");

  // generate
  std::string kind_name;
  std::int64_t n_users = 1000;
  std::int64_t t_slots = 2000;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  pwsm::TlnsParams tlns;
  pwsm::SinParams sin;
  pwsm::LogParams log;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a synthetic stream as a user_id,slot,category CSV");
  generate->add_option("--kind", kind_name, "Stream kind")
      ->required()
      ->check(CLI::IsMember({"tlns", "sin", "log"}));
  generate->add_option("--n", n_users, "Number of users")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{0xFFFFFFFF}));
  generate->add_option("--t", t_slots, "Number of slots")
      ->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "Stream seed");
  generate->add_option("--out", gen_out, "Output CSV path")->required();
  generate->add_option("--start", tlns.start,
                       "Random-walk start probability (tlns)");
  generate->add_option("--stddev", tlns.stddev,
                       "Random-walk step deviation (tlns)");
  double amplitude = 0.0;
  CLI::Option* amplitude_option = generate->add_option(
      "--amplitude", amplitude, "Wave or ramp amplitude (sin, log)");
  generate->add_option("--omega", sin.omega, "Angular frequency (sin)");
  generate->add_option("--offset", sin.offset, "Wave offset (sin)");
  generate->add_option("--rate", log.rate, "Ramp growth rate (log)");

  // audit
  std::string ledger_path;
  std::string requirements_path;
  CLI::App* audit = app.add_subcommand(
      "audit", "Check a charge ledger against declared requirements");
  audit->add_option("--ledger", ledger_path, "user_id,slot,phase,amount CSV")
      ->required();
  audit
      ->add_option("--requirements", requirements_path,
                   "user_id,window,epsilon CSV")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, seed_option->count() > 0, seed_override,
                         jobs, zero_noise, out_dir);
    }
    if (generate->parsed()) {
      if (amplitude_option->count() > 0) {
        sin.amplitude = amplitude;
        log.amplitude = amplitude;
      }
      return generate_command(kind_name, n_users, t_slots, gen_seed, gen_out,
                              tlns, sin, log);
    }
    if (audit->parsed()) {
      return audit_command(ledger_path, requirements_path);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
  return 0;
}
