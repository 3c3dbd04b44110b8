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

#ifndef ANONCLOUD_WORLD_H_
#define ANONCLOUD_WORLD_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "anoncloud/compute.h"
#include "anoncloud/config.h"
#include "anoncloud/directory.h"
#include "anoncloud/directory_server.h"
#include "anoncloud/manager.h"
#include "anoncloud/parties.h"
#include "anoncloud/prng.h"
#include "anoncloud/probe.h"
#include "anoncloud/simnet.h"
#include "anoncloud/trace.h"
#include "anoncloud/transcript.h"

namespace anoncloud::scenario {

// One simulated deployment: a manager, a directory server, a bank, a master
// node, the configured slave nodes and whichever customers the events bring
// in. Every random choice derives from the config seed.
class World {
 public:
  explicit World(const ScenarioConfig& config);
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  // Executes every configured event in order, each to quiescence. Stops at
  // the first livelock and records it for the trace.
  void Run();

  // Individual events; each drains the network before returning. Throw
  // Error(kLivelockSuspected) when the step budget runs out.
  void Request(const RequestSpec& request);
  void Batch(std::span<const RequestSpec> requests);
  void Rotate();
  void RandomRequests(std::size_t count, std::size_t max_items);
  // Re-sends a copy of the next order the master receives.
  void ArmReplay() { replay_armed_ = true; }
  // Re-sends every order the master receives, forever.
  void ArmLoop() { loop_ = true; }
  void AddAdversary(simnet::AdversaryModel model) { adversaries_.insert(model); }

  Trace Export() const;

  const ScenarioConfig& config() const { return config_; }
  simnet::Network& network() { return network_; }
  const simnet::Network& network() const { return network_; }
  manager::Manager& manager() { return *manager_; }
  const manager::TokenLedger& ledger() const { return ledger_; }
  const directory::Directory& directory() const { return directory_; }
  const compute::MasterNode& master() const { return *master_; }
  const parties::Bank& bank() const { return *bank_; }
  const parties::Customer* customer(const std::string& name) const;
  // Keys, secrets and every envelope delivered so far.
  simnet::Transcript transcript() const;
  const std::vector<ProbeRecord>& events() const { return events_; }
  const std::optional<std::string>& livelock() const { return livelock_; }
  Address master_address() const;

  // Random job of `max_items` items at most, as text.
  static std::string RandomJob(Prng& prng, std::size_t max_items);

 private:
  simnet::Probe MakeProbe();
  parties::Customer& CustomerFor(const std::string& name);
  void Quiesce();
  void RecordEpoch();

  ScenarioConfig config_;
  Prng root_;
  Prng key_prng_;
  Prng random_prng_;
  simnet::Transcript transcript_;
  simnet::Network network_;
  manager::TokenLedger ledger_;
  directory::Directory directory_;
  std::vector<ProbeRecord> events_;
  std::vector<EpochRecord> epochs_;
  std::set<simnet::AdversaryModel> adversaries_;

  std::string master_id_;
  std::vector<std::string> slave_ids_;
  std::unique_ptr<manager::Manager> manager_;
  std::unique_ptr<directory::DirectoryServer> ds_;
  std::unique_ptr<parties::Bank> bank_;
  std::unique_ptr<compute::MasterNode> master_;
  std::vector<std::unique_ptr<compute::SlaveNode>> slaves_;
  std::map<std::string, std::unique_ptr<parties::Customer>> customers_;
  std::size_t random_customers_ = 0;

  bool replay_armed_ = false;
  bool loop_ = false;
  std::optional<std::string> livelock_;
};

}  // namespace anoncloud::scenario

#endif  // ANONCLOUD_WORLD_H_
