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

#ifndef ANONCLOUD_REPORT_H_
#define ANONCLOUD_REPORT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anoncloud/config.h"
#include "anoncloud/knowledge.h"
#include "anoncloud/trace.h"

namespace anoncloud::scenario {

inline constexpr int kReportSchemaVersion = 1;

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::string detail;

  friend bool operator==(const InvariantResult&, const InvariantResult&) = default;
};

struct BillingSummary {
  std::size_t records = 0;
  std::int64_t total = 0;

  friend bool operator==(const BillingSummary&, const BillingSummary&) = default;
};

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string transcript_path;
  std::uint64_t seed = 0;
  std::string payment_mode;
  std::vector<InvariantResult> invariants;
  std::vector<simnet::LinkageVerdict> verdicts;
  BillingSummary billing;

  bool passed() const;
  std::vector<std::string> failing() const;
  const InvariantResult* Find(std::string_view name) const;
};

// Names of the invariants every report carries, in report order. Linkage
// checks follow as "linkage/<model>" for each analysed adversary model.
std::vector<std::string> CoreInvariantNames();

// Evaluates every invariant over the trace. `extra` adds adversary models to
// those recorded in the trace.
RunReport Analyze(const Trace& trace,
                  std::span<const simnet::AdversaryModel> extra = {});

std::string ReportJson(const RunReport& report);

// Simulates `config` and analyses the result.
struct RunOutcome {
  Trace trace;
  RunReport report;
};
RunOutcome RunScenario(const ScenarioConfig& config);

}  // namespace anoncloud::scenario

#endif  // ANONCLOUD_REPORT_H_
