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

#ifndef ANONCLOUD_CONFIG_H_
#define ANONCLOUD_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anoncloud/directory.h"
#include "anoncloud/knowledge.h"
#include "anoncloud/manager.h"
#include "anoncloud/simnet.h"

namespace anoncloud::scenario {

inline constexpr int kConfigSchemaVersion = 1;

struct CatalogItem {
  std::int64_t service_number = 0;
  std::string type;
  std::int64_t unit_price = 0;
};

struct RequestSpec {
  std::string customer;
  std::int64_t service_number = 1;
  std::int64_t quantity = 1;
  std::string job;
};

enum class EventKind {
  kRequest,         // one session, run to quiescence
  kBatch,           // several sessions started together
  kRotate,          // directory rotates every pseudonym
  kAdversary,       // adds an adversary model to the analysis
  kRandomRequests,  // `count` seeded sessions, one after another
  kInjectReplay,    // duplicates the next order delivered to the master
};

struct Event {
  EventKind kind = EventKind::kRequest;
  std::vector<RequestSpec> requests;
  simnet::AdversaryModel adversary = simnet::AdversaryModel::kGlobalObserver;
  std::size_t count = 0;
  std::size_t max_items = 32;
};

struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 1;
  std::size_t slave_nodes = 3;
  std::size_t master_nodes = 1;
  std::size_t directory_servers = 1;
  std::size_t managers = 1;
  std::size_t banks = 1;
  std::size_t circuit_length = directory::kDefaultMinCircuitLength;
  // Sub-services per job; 0 uses every slave hop of the circuit.
  std::size_t parts = 0;
  std::vector<CatalogItem> catalog;
  manager::PaymentMode payment_mode = manager::PaymentMode::kPostpaid;
  std::vector<simnet::AdversaryModel> adversaries;
  std::vector<Event> events;
  std::size_t step_budget = simnet::kDefaultStepBudget;
  directory::TrustAnchors trust_anchors = directory::DefaultTrustAnchors();
};

// Throws Error(kConfig) naming the field and rule that failed.
void Validate(const ScenarioConfig& config);

// Parses YAML text. Syntax errors and bad fields are reported as
// Error(kConfig) with "line N" of the offending node.
ScenarioConfig ParseConfig(std::string_view text);
ScenarioConfig LoadConfig(const std::string& path);

// Three slave nodes, one summation service and one postpaid customer session,
// analysed under every adversary model.
ScenarioConfig CanonicalConfig();

std::string_view EventKindName(EventKind kind);

}  // namespace anoncloud::scenario

#endif  // ANONCLOUD_CONFIG_H_
