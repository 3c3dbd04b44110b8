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

#include "anoncloud/simnet.h"

#include <utility>

#include "anoncloud/error.h"

namespace anoncloud::simnet {

std::string_view BodyKindName(BodyKind kind) {
  switch (kind) {
    case BodyKind::kSealed: return "sealed";
    case BodyKind::kOnion: return "onion";
    case BodyKind::kReply: return "reply";
    case BodyKind::kPlain: return "plain";
  }
  return "?";
}

BodyKind ParseBodyKind(std::string_view name) {
  if (name == "sealed") return BodyKind::kSealed;
  if (name == "onion") return BodyKind::kOnion;
  if (name == "reply") return BodyKind::kReply;
  if (name == "plain") return BodyKind::kPlain;
  throw Error(ErrorCode::kSchema, "unknown body kind " + std::string(name));
}

void Network::Register(const Address& address, Actor* actor) {
  if (!actors_.emplace(address, actor).second) {
    throw Error(ErrorCode::kDuplicateRegistration,
                "address " + address.str() + " already bound");
  }
}

void Network::Unregister(const Address& address) { actors_.erase(address); }

void Network::Rebind(const Address& from, const Address& to) {
  auto it = actors_.find(from);
  if (it == actors_.end()) {
    throw Error(ErrorCode::kRoutingError, "no actor at " + from.str());
  }
  Actor* actor = it->second;
  actors_.erase(it);
  Register(to, actor);
}

void Network::Send(Envelope envelope) {
  envelope.sent_at = tick_;
  envelope.tick = 0;
  if (envelope.session.empty()) envelope.session = current_session_;
  pending_.push_back(std::move(envelope));
}

void Network::Deliver(Envelope envelope) {
  envelope.tick = ++tick_;
  auto it = actors_.find(envelope.to);
  envelope.dead_letter = it == actors_.end();
  log_.push_back(envelope);
  if (envelope.dead_letter) return;
  SessionId outer = std::exchange(current_session_, envelope.session);
  it->second->OnEnvelope(envelope, *this);
  current_session_ = outer;
  if (hook_) hook_(envelope, *this);
}

bool Network::Step() {
  if (pending_.empty()) return false;
  Envelope next = std::move(pending_.front());
  pending_.pop_front();
  Deliver(std::move(next));
  return true;
}

std::size_t Network::RunUntilQuiescent(std::size_t budget) {
  std::size_t delivered = 0;
  while (!pending_.empty()) {
    if (log_.size() >= budget) {
      throw Error(ErrorCode::kLivelockSuspected,
                  "step budget of " + std::to_string(budget) +
                      " deliveries exhausted with " +
                      std::to_string(pending_.size()) + " pending");
    }
    Step();
    ++delivered;
  }
  return delivered;
}

}  // namespace anoncloud::simnet
