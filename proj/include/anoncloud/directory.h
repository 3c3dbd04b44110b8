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

#ifndef ANONCLOUD_DIRECTORY_H_
#define ANONCLOUD_DIRECTORY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/ids.h"
#include "anoncloud/prng.h"

namespace anoncloud::directory {

inline constexpr std::size_t kDefaultMinCircuitLength = 3;

enum class NodeRole { kSlave, kMaster };

struct NodeRecord {
  TrueId true_id;
  Pseudonym pseudonym;
  crypto::PublicKey public_key;
  NodeRole role = NodeRole::kSlave;
};

// What the directory hands out: never the true id.
struct NodeView {
  Pseudonym pseudonym;
  crypto::PublicKey public_key;
  NodeRole role = NodeRole::kSlave;
};

// Ordered relay hops. The last hop is always the master node.
struct Circuit {
  std::vector<crypto::Hop> hops;
  std::uint64_t epoch = 0;

  std::span<const crypto::Hop> slave_hops() const {
    return std::span<const crypto::Hop>(hops).first(hops.empty() ? 0 : hops.size() - 1);
  }
  const crypto::Hop& master() const { return hops.back(); }
};

// Empty string when `circuit` has distinct hops, at least `min_length` of
// them, and ends at `master`; otherwise the name of the broken rule.
std::string ValidateCircuit(const Circuit& circuit, std::size_t min_length,
                            const Pseudonym& master);

struct RotationEpoch {
  std::uint64_t epoch_number = 0;
  std::uint64_t prng_seed = 0;
};

struct ServiceDescriptor {
  std::int64_t service_number = 0;
};

using PseudonymMapping = std::map<Pseudonym, Pseudonym>;

// Principals allowed to read the node list and request circuits. Loaded from
// the scenario config in place of certificate issuance.
using TrustAnchors = std::set<std::string>;

inline const TrustAnchors& DefaultTrustAnchors() {
  static const TrustAnchors anchors = {"manager", "master"};
  return anchors;
}

class Directory {
 public:
  explicit Directory(std::size_t min_circuit_length = kDefaultMinCircuitLength,
                     TrustAnchors trust = DefaultTrustAnchors());

  // Throws kDuplicateRegistration on a repeated true id or pseudonym.
  void RegisterNode(const NodeRecord& record);

  // Fresh PRNG-drawn pseudonym for every registered node, never reusing a
  // name issued before. Advances the epoch even for an empty registry, which
  // makes every earlier circuit stale.
  PseudonymMapping RotatePseudonyms(Prng& prng);

  // Draws length-1 distinct slaves uniformly without replacement and appends
  // `master`. Throws kPrecondition when length is below the minimum or
  // `master` is not the registered master, kCapacity when too few slaves.
  Circuit BuildCircuit(const ServiceDescriptor& request,
                       const NodeRecord& master, std::size_t length,
                       Prng& prng);

  // Throws kAccessDenied unless `requester` is a trust anchor.
  std::vector<NodeView> CurrentList(const std::string& requester) const;

  bool IsCurrent(const Circuit& circuit) const {
    return circuit.epoch == epoch_.epoch_number;
  }

  const RotationEpoch& epoch() const { return epoch_; }
  std::size_t min_circuit_length() const { return min_circuit_length_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t slave_count() const;

  const NodeRecord* FindByTrueId(const TrueId& id) const;
  const NodeRecord* FindByPseudonym(const Pseudonym& pseudonym) const;
  std::optional<NodeRecord> master() const;
  const std::map<TrueId, NodeRecord>& nodes() const { return nodes_; }
  const std::vector<Circuit>& issued() const { return issued_; }

 private:
  Pseudonym DrawPseudonym(Prng& prng);

  std::size_t min_circuit_length_;
  TrustAnchors trust_;
  std::map<TrueId, NodeRecord> nodes_;
  std::map<Pseudonym, TrueId> by_pseudonym_;
  std::unordered_set<std::string> ever_issued_;
  RotationEpoch epoch_;
  std::vector<Circuit> issued_;
};

}  // namespace anoncloud::directory

#endif  // ANONCLOUD_DIRECTORY_H_
