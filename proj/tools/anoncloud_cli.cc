// Copyright 2026 The Anoncloud Authors
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

// Command-line scenario runner.
//
//   anoncloud run [--scenario FILE] [--seed N] [--payment-mode MODE]
//                 [--adversary MODEL]... [--step-budget N]
//                 [--trace-out FILE] [--report-out FILE]
//   anoncloud replay TRACE [--adversary MODEL]... [--report-out FILE]
//   anoncloud check-config FILE
//
// Exit codes: 0 every invariant passed, 1 an invariant failed, 2 the config
// or trace was rejected. ANONCLOUD_SEED overrides the config seed; --seed
// overrides both.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anoncloud/config.h"
#include "anoncloud/error.h"
#include "anoncloud/report.h"
#include "anoncloud/trace.h"
#include "anoncloud/world.h"

namespace {

using anoncloud::Error;
using anoncloud::ErrorCode;
namespace scenario = anoncloud::scenario;
namespace simnet = anoncloud::simnet;

constexpr int kExitPass = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

std::uint64_t ParseSeed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    unsigned long long value = std::stoull(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, source + " is not an unsigned integer: " + text);
}

int Emit(const scenario::RunReport& report, const std::string& report_out) {
  const std::string json = scenario::ReportJson(report);
  if (report_out.empty()) {
    std::cout << json;
  } else {
    std::ofstream(report_out) << json;
  }
  for (const auto& r : report.invariants) {
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cerr << "  (" << r.detail << ")";
    std::cerr << "\n";
  }
  return report.passed() ? kExitPass : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anonymous cloud service simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> seed_flag;
  std::string payment_mode;
  std::vector<std::string> adversaries;
  std::optional<std::size_t> step_budget;
  std::string trace_out;
  std::string report_out;
  std::string trace_path;
  std::string config_path;

  CLI::App* run = app.add_subcommand("run", "simulate a scenario and check it");
  run->add_option("--scenario", scenario_path, "scenario YAML (default: canonical)");
  run->add_option("--seed", seed_flag, "PRNG seed");
  run->add_option("--payment-mode", payment_mode, "prepaid or postpaid");
  run->add_option("--adversary", adversaries, "adversary model to analyse");
  run->add_option("--step-budget", step_budget, "maximum deliveries");
  run->add_option("--trace-out", trace_out, "write the JSONL trace here");
  run->add_option("--report-out", report_out, "write the JSON report here");

  CLI::App* replay = app.add_subcommand("replay", "re-analyse a saved trace");
  replay->add_option("trace", trace_path, "JSONL trace")->required();
  replay->add_option("--adversary", adversaries, "extra adversary model");
  replay->add_option("--report-out", report_out, "write the JSON report here");

  CLI::App* check = app.add_subcommand("check-config", "validate a scenario file");
  check->add_option("scenario", config_path, "scenario YAML")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitConfig;
  }

  try {
    std::vector<simnet::AdversaryModel> models;
    for (const auto& name : adversaries) models.push_back(simnet::ParseModel(name));

    if (*check) {
      scenario::LoadConfig(config_path);
      std::cout << config_path << ": ok\n";
      return kExitPass;
    }

    if (*replay) {
      std::ifstream in(trace_path);
      if (!in) throw Error(ErrorCode::kSchema, "cannot read " + trace_path);
      scenario::Trace trace = scenario::ReadTrace(in);
      scenario::RunReport report = scenario::Analyze(trace, models);
      report.transcript_path = trace_path;
      return Emit(report, report_out);
    }

    scenario::ScenarioConfig config = scenario_path.empty()
                                          ? scenario::CanonicalConfig()
                                          : scenario::LoadConfig(scenario_path);
    if (const char* env = std::getenv("ANONCLOUD_SEED")) {
      config.seed = ParseSeed(env, "ANONCLOUD_SEED");
    }
    if (seed_flag) config.seed = ParseSeed(*seed_flag, "--seed");
    if (!payment_mode.empty()) {
      config.payment_mode = anoncloud::manager::ParsePaymentMode(payment_mode);
    }
    if (step_budget) config.step_budget = *step_budget;
    config.adversaries.insert(config.adversaries.end(), models.begin(), models.end());
    scenario::Validate(config);

    scenario::World world(config);
    world.Run();
    scenario::Trace trace = world.Export();
    if (!trace_out.empty()) {
      std::ofstream out(trace_out);
      scenario::WriteTrace(trace, out);
    }
    scenario::RunReport report = scenario::Analyze(trace);
    report.transcript_path = trace_out;
    return Emit(report, report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kSchema
               ? kExitConfig
               : kExitInvariant;
  }
}
