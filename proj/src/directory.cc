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

#include "anoncloud/directory.h"

#include <algorithm>

#include "anoncloud/error.h"

namespace anoncloud::directory {

std::string ValidateCircuit(const Circuit& circuit, std::size_t min_length,
                            const Pseudonym& master) {
  if (circuit.hops.size() < min_length) return "min-length";
  std::set<Pseudonym> seen;
  for (const auto& hop : circuit.hops) {
    if (!seen.insert(hop.pseudonym).second) return "distinct-hops";
  }
  if (circuit.master().pseudonym != master) return "master-terminal";
  return "";
}

Directory::Directory(std::size_t min_circuit_length, TrustAnchors trust)
    : min_circuit_length_(min_circuit_length), trust_(std::move(trust)) {}

void Directory::RegisterNode(const NodeRecord& record) {
  if (nodes_.contains(record.true_id)) {
    throw Error(ErrorCode::kDuplicateRegistration,
                "true id already registered");
  }
  if (record.pseudonym.empty() || ever_issued_.contains(record.pseudonym.str())) {
    throw Error(ErrorCode::kDuplicateRegistration,
                "pseudonym " + record.pseudonym.str() + " already in use");
  }
  if (record.role == NodeRole::kMaster && master().has_value()) {
    throw Error(ErrorCode::kDuplicateRegistration, "master already registered");
  }
  ever_issued_.insert(record.pseudonym.str());
  by_pseudonym_.emplace(record.pseudonym, record.true_id);
  nodes_.emplace(record.true_id, record);
}

Pseudonym Directory::DrawPseudonym(Prng& prng) {
  while (true) {
    std::string name = "n-" + prng.Hex(8);
    if (ever_issued_.insert(name).second) return Pseudonym(std::move(name));
  }
}

PseudonymMapping Directory::RotatePseudonyms(Prng& prng) {
  PseudonymMapping mapping;
  by_pseudonym_.clear();
  for (auto& [true_id, record] : nodes_) {
    Pseudonym fresh = DrawPseudonym(prng);
    mapping.emplace(record.pseudonym, fresh);
    record.pseudonym = fresh;
    by_pseudonym_.emplace(fresh, true_id);
  }
  epoch_.epoch_number += 1;
  epoch_.prng_seed = prng.seed();
  return mapping;
}

Circuit Directory::BuildCircuit(const ServiceDescriptor& /*request*/,
                                const NodeRecord& master, std::size_t length,
                                Prng& prng) {
  if (length < min_circuit_length_) {
    throw Error(ErrorCode::kPrecondition,
                "circuit length " + std::to_string(length) +
                    " is below the minimum of " +
                    std::to_string(min_circuit_length_));
  }
  const NodeRecord* registered = FindByTrueId(master.true_id);
  if (registered == nullptr || registered->role != NodeRole::kMaster ||
      registered->public_key != master.public_key) {
    throw Error(ErrorCode::kPrecondition, "master node is not registered");
  }
  std::vector<const NodeRecord*> slaves;
  for (const auto& [id, record] : nodes_) {
    if (record.role == NodeRole::kSlave) slaves.push_back(&record);
  }
  if (slaves.size() < length - 1) {
    throw Error(ErrorCode::kCapacity,
                "need " + std::to_string(length - 1) + " slave nodes, have " +
                    std::to_string(slaves.size()));
  }
  Circuit circuit;
  circuit.epoch = epoch_.epoch_number;
  for (const NodeRecord* slave : prng.Sample(std::move(slaves), length - 1)) {
    circuit.hops.push_back({slave->pseudonym, slave->public_key});
  }
  circuit.hops.push_back({registered->pseudonym, registered->public_key});
  issued_.push_back(circuit);
  return circuit;
}

std::vector<NodeView> Directory::CurrentList(const std::string& requester) const {
  if (!trust_.contains(requester)) {
    throw Error(ErrorCode::kAccessDenied,
                requester + " is not a directory trust anchor");
  }
  std::vector<NodeView> out;
  out.reserve(nodes_.size());
  for (const auto& [pseudonym, true_id] : by_pseudonym_) {
    const NodeRecord& record = nodes_.at(true_id);
    out.push_back({record.pseudonym, record.public_key, record.role});
  }
  return out;
}

std::size_t Directory::slave_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& entry) {
        return entry.second.role == NodeRole::kSlave;
      }));
}

const NodeRecord* Directory::FindByTrueId(const TrueId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const NodeRecord* Directory::FindByPseudonym(const Pseudonym& pseudonym) const {
  auto it = by_pseudonym_.find(pseudonym);
  return it == by_pseudonym_.end() ? nullptr : &nodes_.at(it->second);
}

std::optional<NodeRecord> Directory::master() const {
  for (const auto& [id, record] : nodes_) {
    if (record.role == NodeRole::kMaster) return record;
  }
  return std::nullopt;
}

}  // namespace anoncloud::directory
