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

#ifndef ANONCLOUD_PROTOCOL_H_
#define ANONCLOUD_PROTOCOL_H_

#include <cstdint>
#include <string>

#include "anoncloud/crypto.h"
#include "anoncloud/directory.h"
#include "anoncloud/ids.h"
#include "anoncloud/message.h"

// Message shapes shared by more than one actor.
namespace anoncloud::protocol {

inline const Address& ManagerAddress() {
  static const Address address("manager");
  return address;
}
inline const Address& DirectoryAddress() {
  static const Address address("ds");
  return address;
}
inline const Address& BankAddress() {
  static const Address address("bank");
  return address;
}

// Appends epoch, hop and hop_key fields.
void PutCircuit(Message& message, const directory::Circuit& circuit);
directory::Circuit GetCircuit(const Message& message);

void PutKey(Message& message, std::string_view field,
            const crypto::PublicKey& key);
crypto::PublicKey GetKey(const Message& message, std::string_view field);

// What an agent sends the master node, sealed to the master's key. Carries no
// customer identity.
struct ServiceOrder {
  TokenId token_id;
  SessionId session_id;
  std::int64_t service_number = 0;
  std::int64_t quantity = 1;
  std::string job;
  directory::Circuit circuit;
  // Final hop of the result onion: the agent, reached at the manager.
  Pseudonym agent_hop;
  crypto::PublicKey agent_key;
  // Customer's per-session key; the result is sealed to it.
  crypto::PublicKey reply_key;
};

Message ToMessage(const ServiceOrder& order);
ServiceOrder OrderFromMessage(const Message& message);

}  // namespace anoncloud::protocol

#endif  // ANONCLOUD_PROTOCOL_H_
