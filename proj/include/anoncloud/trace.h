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

#ifndef ANONCLOUD_TRACE_H_
#define ANONCLOUD_TRACE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anoncloud/ids.h"
#include "anoncloud/knowledge.h"
#include "anoncloud/manager.h"
#include "anoncloud/transcript.h"

namespace anoncloud::scenario {

inline constexpr int kTraceSchemaVersion = 1;

// A probe event stamped with the tick being processed when it fired.
struct ProbeRecord {
  std::uint64_t tick = 0;
  std::string name;
  SessionId session;
  std::string detail;

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

// Customer-side view of one session at the end of the run.
struct SessionRecord {
  std::string customer;
  SessionId session;
  TokenId token;
  std::int64_t service_number = 0;
  std::int64_t quantity = 0;
  std::string job;
  std::optional<std::string> result;
  bool torn_down = false;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

// Pseudonym of every node from `tick` on.
struct EpochRecord {
  std::uint64_t epoch = 0;
  std::uint64_t tick = 0;
  std::map<std::string, std::string> names;  // true id -> pseudonym

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// Everything the analysis needs, so a saved run can be re-analysed without
// re-simulating it.
struct Trace {
  int schema_version = kTraceSchemaVersion;
  std::uint64_t seed = 0;
  std::string payment_mode;
  std::size_t circuit_length = 0;
  std::string master_id;
  std::vector<std::string> slave_ids;
  std::vector<std::string> adversaries;
  std::map<std::int64_t, std::int64_t> prices;
  simnet::Transcript transcript;
  std::vector<ProbeRecord> events;
  std::vector<SessionRecord> sessions;
  std::vector<EpochRecord> epochs;
  std::vector<simnet::StoreEntry> store;
  std::vector<manager::BillingRecord> billing;
  std::vector<manager::Token> tokens;
  // Set when the run stopped on its step budget.
  std::optional<std::string> livelock;
};

// One JSON object per line, closed by an "end" record carrying the line count.
void WriteTrace(const Trace& trace, std::ostream& out);
std::string TraceText(const Trace& trace);

// Throws Error(kSchema) on a version mismatch, a malformed line or a missing
// or inconsistent end record.
Trace ReadTrace(std::istream& in);

}  // namespace anoncloud::scenario

#endif  // ANONCLOUD_TRACE_H_
