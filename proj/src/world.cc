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

#include "anoncloud/world.h"

#include <cstdio>

#include "anoncloud/error.h"
#include "anoncloud/protocol.h"

namespace anoncloud::scenario {

using simnet::SecretKind;

namespace {

std::string NodeId(std::string_view prefix, std::size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%03zu", prefix.data(), index);
  return buffer;
}

}  // namespace

simnet::Probe World::MakeProbe() {
  simnet::Probe probe;
  probe.secret = [this](simnet::SecretRef ref) {
    transcript_.secrets.Add(std::move(ref));
  };
  probe.session_key = [this](const std::string& principal,
                             const SessionId& session) {
    return transcript_.keys.Add(principal, key_prng_.Next(), false, session);
  };
  probe.event = [this](const std::string& name, const SessionId& session,
                       const std::string& detail) {
    events_.push_back({network_.now(), name, session, detail});
  };
  return probe;
}

World::World(const ScenarioConfig& config)
    : config_(config),
      root_(config.seed),
      key_prng_(root_.Fork("keys")),
      random_prng_(root_.Fork("random-requests")),
      directory_(directory::kDefaultMinCircuitLength, config.trust_anchors) {
  Validate(config_);
  for (auto model : config_.adversaries) adversaries_.insert(model);
  transcript_.keys.AddPrincipal(std::string(simnet::kObserver));

  auto manager_keys = transcript_.keys.Add("manager", key_prng_.Next(), true);
  auto ds_keys = transcript_.keys.Add("ds", key_prng_.Next(), true);
  auto bank_keys = transcript_.keys.Add("bank", key_prng_.Next(), true);
  auto master_keys = transcript_.keys.Add("master", key_prng_.Next(), true);

  // Initial names come from their own stream; later ones from the directory's
  // rotation stream.
  Prng names = root_.Fork("initial-pseudonyms");
  std::set<std::string> used;
  auto fresh_name = [&] {
    std::string name;
    do {
      name = "n-" + names.Hex(8);
    } while (!used.insert(name).second);
    return Pseudonym(name);
  };

  simnet::Probe probe = MakeProbe();
  master_id_ = "mn-0";
  directory::NodeRecord master_record{TrueId(master_id_), fresh_name(),
                                      master_keys.public_part,
                                      directory::NodeRole::kMaster};
  directory_.RegisterNode(master_record);
  for (std::size_t i = 0; i < config_.slave_nodes; ++i) {
    std::string id = NodeId("sn-", i);
    auto keys = transcript_.keys.Add(id, key_prng_.Next(), true);
    directory::NodeRecord record{TrueId(id), fresh_name(), keys.public_part,
                                 directory::NodeRole::kSlave};
    directory_.RegisterNode(record);
    slave_ids_.push_back(id);
    slaves_.push_back(std::make_unique<compute::SlaveNode>(
        TrueId(id), keys, master_keys.public_part, root_.Fork("sn/" + id), probe));
    network_.Register(Address(record.pseudonym.str()), slaves_.back().get());
  }
  for (const auto& [id, record] : directory_.nodes()) {
    transcript_.secrets.Add({SecretKind::kTrueId, id.str(), {}, id.str()});
    transcript_.secrets.Add({SecretKind::kPseudonym, record.pseudonym.str(), {}, id.str()});
  }

  manager::ServiceCatalog catalog;
  for (const CatalogItem& item : config_.catalog) {
    catalog.Add(item.service_number, {item.type, item.unit_price});
  }
  manager_ = std::make_unique<manager::Manager>(
      manager_keys, std::move(catalog), ledger_, config_.payment_mode,
      manager::Peers{ds_keys.public_part, bank_keys.public_part,
                     master_keys.public_part},
      root_.Fork("manager"), probe);
  ds_ = std::make_unique<directory::DirectoryServer>(
      directory_, ds_keys, config_.circuit_length, root_.Fork("circuits"),
      root_.Fork("rotations"), probe);
  bank_ = std::make_unique<parties::Bank>(bank_keys, manager_keys.public_part,
                                          root_.Fork("bank"), probe);
  master_ = std::make_unique<compute::MasterNode>(
      master_keys, ledger_, directory_.epoch().epoch_number,
      root_.Fork("master"), probe, config_.parts);

  network_.Register(protocol::ManagerAddress(), manager_.get());
  network_.Register(protocol::DirectoryAddress(), ds_.get());
  network_.Register(protocol::BankAddress(), bank_.get());
  network_.Register(Address(master_record.pseudonym.str()), master_.get());

  network_.SetDeliveryHook([this](const simnet::Envelope& e, simnet::Network& net) {
    if (e.kind != simnet::BodyKind::kOnion || e.to != master_address()) return;
    if (replay_armed_) {
      replay_armed_ = false;
      net.Send(e);
    }
    if (loop_) net.Send(e);
  });
  RecordEpoch();
}

Address World::master_address() const {
  return Address(directory_.master()->pseudonym.str());
}

void World::RecordEpoch() {
  EpochRecord record;
  record.epoch = directory_.epoch().epoch_number;
  record.tick = network_.now();
  for (const auto& [id, node] : directory_.nodes()) {
    record.names[id.str()] = node.pseudonym.str();
  }
  epochs_.push_back(std::move(record));
}

const parties::Customer* World::customer(const std::string& name) const {
  auto it = customers_.find("customer-" + name);
  return it == customers_.end() ? nullptr : it->second.get();
}

parties::Customer& World::CustomerFor(const std::string& name) {
  const std::string address = "customer-" + name;
  auto it = customers_.find(address);
  if (it != customers_.end()) return *it->second;
  Prng prng = root_.Fork("customer/" + name);
  std::string identity = "cid:" + name + ":" + prng.Hex(6);
  auto customer = std::make_unique<parties::Customer>(
      address, identity, manager_->public_key(), bank_->public_key(),
      config_.payment_mode, prng, MakeProbe());
  network_.Register(Address(address), customer.get());
  return *customers_.emplace(address, std::move(customer)).first->second;
}

void World::Quiesce() {
  try {
    network_.RunUntilQuiescent(config_.step_budget);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLivelockSuspected) livelock_ = e.what();
    throw;
  }
}

void World::Request(const RequestSpec& request) {
  Batch(std::span<const RequestSpec>(&request, 1));
}

void World::Batch(std::span<const RequestSpec> requests) {
  for (const RequestSpec& request : requests) {
    CustomerFor(request.customer)
        .Start({request.service_number, request.quantity, request.job}, network_);
  }
  Quiesce();
}

void World::Rotate() {
  ds_->Rotate(network_);
  RecordEpoch();
  Quiesce();
}

std::string World::RandomJob(Prng& prng, std::size_t max_items) {
  static constexpr std::string_view kOps[] = {"sum", "min", "max", "concat"};
  const auto op = prng.Uniform(4);
  const auto n = static_cast<std::size_t>(prng.Range(1, static_cast<std::int64_t>(max_items)));
  std::string job = std::string(kOps[op]) + "[";
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) job += ",";
    if (op == 3 && prng.Uniform(2) == 0) {
      std::string word;
      const auto len = prng.Range(1, 6);
      for (std::int64_t k = 0; k < len; ++k) word += static_cast<char>('a' + prng.Uniform(26));
      job += "\"" + word + "\"";
    } else {
      job += std::to_string(prng.Range(-1000, 1000));
    }
  }
  return job + "]";
}

void World::RandomRequests(std::size_t count, std::size_t max_items) {
  for (std::size_t i = 0; i < count; ++i) {
    RequestSpec spec;
    spec.customer = "rand-" + std::to_string(random_customers_++);
    spec.service_number = config_.catalog[random_prng_.Uniform(config_.catalog.size())]
                              .service_number;
    spec.quantity = random_prng_.Range(1, 5);
    spec.job = RandomJob(random_prng_, max_items);
    Request(spec);
  }
}

void World::Run() {
  try {
    for (const Event& event : config_.events) {
      switch (event.kind) {
        case EventKind::kRequest:
        case EventKind::kBatch:
          Batch(event.requests);
          break;
        case EventKind::kRotate:
          Rotate();
          break;
        case EventKind::kAdversary:
          AddAdversary(event.adversary);
          break;
        case EventKind::kRandomRequests:
          RandomRequests(event.count, event.max_items);
          break;
        case EventKind::kInjectReplay:
          ArmReplay();
          break;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kLivelockSuspected) throw;
  }
}

simnet::Transcript World::transcript() const {
  simnet::Transcript out = transcript_;
  out.envelopes = network_.log();
  return out;
}

Trace World::Export() const {
  Trace trace;
  trace.seed = config_.seed;
  trace.payment_mode = std::string(manager::PaymentModeName(config_.payment_mode));
  trace.circuit_length = config_.circuit_length;
  trace.master_id = master_id_;
  trace.slave_ids = slave_ids_;
  for (auto model : adversaries_) {
    trace.adversaries.emplace_back(simnet::ModelName(model));
  }
  for (const CatalogItem& item : config_.catalog) {
    trace.prices[item.service_number] = item.unit_price;
  }
  trace.transcript = transcript();
  trace.events = events_;
  for (const auto& [name, customer] : customers_) {
    for (const parties::CustomerSession& s : customer->sessions()) {
      SessionRecord record;
      record.customer = name;
      record.session = s.session_id;
      record.token = s.token_id;
      record.service_number = s.request.service_number;
      record.quantity = s.request.quantity;
      record.job = s.request.job;
      record.result = s.result;
      record.torn_down = s.torn_down;
      trace.sessions.push_back(std::move(record));
    }
  }
  trace.epochs = epochs_;
  trace.store = manager_->StoreDump();
  trace.billing = manager_->billing_records();
  for (const auto& [id, token] : ledger_.tokens()) trace.tokens.push_back(token);
  trace.livelock = livelock_;
  return trace;
}

}  // namespace anoncloud::scenario
