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

#include <gtest/gtest.h>

#include <sstream>

#include "anoncloud/config.h"
#include "anoncloud/error.h"
#include "anoncloud/job.h"
#include "anoncloud/report.h"
#include "anoncloud/trace.h"
#include "anoncloud/world.h"

namespace anoncloud::scenario {
namespace {

std::string ScenarioPath(const std::string& name) {
  return std::string(ANONCLOUD_SCENARIO_DIR) + "/" + name;
}

// Config error message, or "" when parsing and validation succeed.
std::string ConfigError(const std::string& text) {
  try {
    Validate(ParseConfig(text));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    return e.what();
  }
  return "";
}

const std::string kMinimal = R"(schema_version: 1
seed: 3
nodes: {slave_nodes: 3}
catalog:
  - {service_number: 1, type: summation, unit_price: 5}
events:
  - request: {customer: bob, service_number: 1, job: "sum[1,2]"}
)";

TEST(ConfigTest, MinimalConfigParses) {
  ScenarioConfig c = ParseConfig(kMinimal);
  Validate(c);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.slave_nodes, 3u);
  EXPECT_EQ(c.circuit_length, 3u);
  EXPECT_EQ(c.payment_mode, manager::PaymentMode::kPostpaid);
  ASSERT_EQ(c.events.size(), 1u);
  EXPECT_EQ(c.events[0].requests[0].customer, "bob");
}

TEST(ConfigTest, ShortCircuitRejectedNamingTheMinimum) {
  std::string text = kMinimal + "circuit: {length: 2}\n";
  std::string error = ConfigError(text);
  EXPECT_NE(error.find("at least 3"), std::string::npos) << error;
  EXPECT_NE(error.find("circuit.length"), std::string::npos) << error;
}

TEST(ConfigTest, TooFewSlavesForTheCircuitRejected) {
  std::string text = kMinimal + "circuit: {length: 4}\n";
  text.replace(text.find("slave_nodes: 3"), 14, "slave_nodes: 2");
  std::string error = ConfigError(text);
  EXPECT_NE(error.find("slave_nodes"), std::string::npos) << error;
}

TEST(ConfigTest, ErrorsCarryLineNumbers) {
  std::string text = kMinimal + "bogus_field: 1\n";
  std::string error = ConfigError(text);
  EXPECT_NE(error.find("line 8"), std::string::npos) << error;
  EXPECT_NE(error.find("bogus_field"), std::string::npos) << error;
  std::string broken = "schema_version: 1\ncatalog: [\n";
  EXPECT_NE(ConfigError(broken).find("line "), std::string::npos);
}

TEST(ConfigTest, OtherRulesRejected) {
  EXPECT_NE(ConfigError("seed: 1\n"), "");
  std::string unknown_service = kMinimal;
  unknown_service.replace(unknown_service.find("service_number: 1, job"), 17,
                          "service_number: 9");
  EXPECT_NE(ConfigError(unknown_service).find("unknown service_number"), std::string::npos);
  std::string two_managers = kMinimal;
  two_managers.replace(two_managers.find("{slave_nodes: 3}"), 16,
                       "{slave_nodes: 3, managers: 2}");
  EXPECT_NE(ConfigError(two_managers).find("exactly one"), std::string::npos);
  std::string bad_job = kMinimal;
  bad_job.replace(bad_job.find("sum[1,2]"), 8, "avg[1]");
  EXPECT_NE(ConfigError(bad_job), "");
}

TEST(ConfigTest, SuiteScenariosLoad) {
  for (const char* name : {"canonical.yaml", "prepaid.yaml", "replay_fault.yaml",
                           "mixed.yaml", "random50.yaml"}) {
    EXPECT_NO_THROW(Validate(LoadConfig(ScenarioPath(name)))) << name;
  }
  EXPECT_THROW(LoadConfig(ScenarioPath("missing.yaml")), Error);
}

TEST(ScenarioTest, PostpaidRunPasses) {
  RunOutcome out = RunScenario(LoadConfig(ScenarioPath("canonical.yaml")));
  EXPECT_TRUE(out.report.passed());
  for (const auto& name : out.report.failing()) ADD_FAILURE() << name;
  ASSERT_EQ(out.trace.sessions.size(), 1u);
  EXPECT_EQ(out.trace.sessions[0].result,
            compute::FormatValue(compute::Evaluate(compute::ParseJob("sum[1,2,3,4]"))));
  EXPECT_EQ(out.report.billing.records, 1u);
  EXPECT_EQ(out.report.billing.total, 5);
}

TEST(ScenarioTest, PrepaidRunPasses) {
  RunOutcome out = RunScenario(LoadConfig(ScenarioPath("prepaid.yaml")));
  EXPECT_EQ(out.trace.payment_mode, "prepaid");
  EXPECT_TRUE(out.report.passed());
  for (const auto& name : out.report.failing()) ADD_FAILURE() << name;
}

TEST(ScenarioTest, ReplayFaultFailsOnlyTokenSingleUse) {
  RunOutcome out = RunScenario(LoadConfig(ScenarioPath("replay_fault.yaml")));
  EXPECT_EQ(out.report.failing(), std::vector<std::string>{"token-single-use"});
}

TEST(ScenarioTest, ReplayedTraceGivesTheSameReport) {
  RunOutcome out = RunScenario(LoadConfig(ScenarioPath("mixed.yaml")));
  std::stringstream stream(TraceText(out.trace));
  Trace back = ReadTrace(stream);
  EXPECT_EQ(TraceText(back), TraceText(out.trace));
  EXPECT_EQ(ReportJson(Analyze(back)), ReportJson(out.report));
}

TEST(ScenarioTest, TruncatedTraceIsASchemaError) {
  RunOutcome out = RunScenario(CanonicalConfig());
  std::string text = TraceText(out.trace);
  text.resize(text.rfind('\n', text.size() - 2) + 1);
  std::stringstream stream(text);
  try {
    ReadTrace(stream);
    FAIL() << "truncated trace accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
  }
}

TEST(ScenarioTest, WrongSchemaVersionIsASchemaError) {
  RunOutcome out = RunScenario(CanonicalConfig());
  Trace trace = out.trace;
  trace.schema_version = 99;
  std::stringstream stream(TraceText(trace));
  try {
    ReadTrace(stream);
    FAIL() << "future schema accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
  }
}

TEST(ScenarioTest, ExtraModelOnReplayAddsItsVerdict) {
  ScenarioConfig config = CanonicalConfig();
  config.adversaries = {simnet::AdversaryModel::kGlobalObserver};
  RunOutcome out = RunScenario(config);
  EXPECT_EQ(out.report.verdicts.size(), 1u);
  std::vector<simnet::AdversaryModel> extra = {simnet::AdversaryModel::kManagerMnCollusion};
  RunReport more = Analyze(out.trace, extra);
  EXPECT_EQ(more.verdicts.size(), 2u);
  EXPECT_NE(more.Find("linkage/manager-mn-collusion"), nullptr);
  EXPECT_TRUE(more.passed());
}

TEST(ScenarioTest, ReportListsEveryCoreInvariantInOrder) {
  RunOutcome out = RunScenario(CanonicalConfig());
  auto names = CoreInvariantNames();
  ASSERT_GE(out.report.invariants.size(), names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(out.report.invariants[i].name, names[i]);
  }
}

TEST(ScenarioTest, RotationBetweenSessionsKeepsInvariants) {
  ScenarioConfig config = CanonicalConfig();
  Event rotate;
  rotate.kind = EventKind::kRotate;
  config.events.push_back(rotate);
  config.events.push_back(config.events.front());
  config.events.back().requests[0].customer = "carol";
  RunOutcome out = RunScenario(config);
  EXPECT_TRUE(out.report.passed());
  for (const auto& name : out.report.failing()) ADD_FAILURE() << name;
  EXPECT_EQ(out.trace.epochs.size(), 2u);
}

}  // namespace
}  // namespace anoncloud::scenario
