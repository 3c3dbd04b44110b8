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

#ifndef ANONCLOUD_SIMNET_H_
#define ANONCLOUD_SIMNET_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anoncloud/bytes.h"
#include "anoncloud/ids.h"

namespace anoncloud::simnet {

inline constexpr std::size_t kDefaultStepBudget = 1'000'000;

enum class BodyKind { kSealed, kOnion, kReply, kPlain };

std::string_view BodyKindName(BodyKind kind);
BodyKind ParseBodyKind(std::string_view name);

struct Envelope {
  std::uint64_t tick = 0;     // delivery tick, assigned by the network
  std::uint64_t sent_at = 0;  // tick being processed when it was sent
  Address from;
  Address to;
  BodyKind kind = BodyKind::kSealed;
  Bytes body;
  // Per-link circuit identifier, visible on the wire like a cell header.
  std::uint64_t link = 0;
  // Ground-truth session annotation for the analysis. Actors never branch on
  // it; they only pass it to their probe. The observer model ignores it.
  SessionId session;
  bool dead_letter = false;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

class Network;

class Actor {
 public:
  virtual ~Actor() = default;
  virtual void OnEnvelope(const Envelope& envelope, Network& network) = 0;
};

// Single global FIFO. Each delivery is recorded before the recipient runs and
// the recipient runs to completion before the next delivery.
class Network {
 public:
  using DeliveryHook = std::function<void(const Envelope&, Network&)>;

  void Register(const Address& address, Actor* actor);
  void Unregister(const Address& address);
  // Moves the actor at `from` to `to`; used when pseudonyms rotate.
  void Rebind(const Address& from, const Address& to);
  bool IsRegistered(const Address& address) const {
    return actors_.contains(address);
  }

  // Queues for delivery. Stamps sent_at; the delivery tick is assigned later.
  // An unlabelled envelope sent while another is being handled inherits that
  // envelope's session label.
  void Send(Envelope envelope);
  // Records and hands `envelope` to its recipient immediately. Unknown
  // recipients produce a dead-letter record instead.
  void Deliver(Envelope envelope);
  // Delivers the oldest pending envelope. False when nothing is pending.
  bool Step();
  // Drains the queue. Throws Error(kLivelockSuspected) once the total number
  // of deliveries in this network would exceed `budget`.
  std::size_t RunUntilQuiescent(std::size_t budget = kDefaultStepBudget);

  // Called after every successful delivery; lets tests inject traffic.
  void SetDeliveryHook(DeliveryHook hook) { hook_ = std::move(hook); }

  bool idle() const { return pending_.empty(); }
  std::size_t pending() const { return pending_.size(); }
  std::uint64_t now() const { return tick_; }
  std::size_t deliveries() const { return log_.size(); }
  const std::vector<Envelope>& log() const { return log_; }

 private:
  std::unordered_map<Address, Actor*> actors_;
  std::deque<Envelope> pending_;
  std::vector<Envelope> log_;
  std::uint64_t tick_ = 0;
  DeliveryHook hook_;
  SessionId current_session_;
};

}  // namespace anoncloud::simnet

#endif  // ANONCLOUD_SIMNET_H_
