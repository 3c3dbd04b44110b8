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

#include "anoncloud/protocol.h"

#include "anoncloud/error.h"

namespace anoncloud::protocol {

void PutKey(Message& message, std::string_view field,
            const crypto::PublicKey& key) {
  message.SetBytes(field, crypto::Encode(key));
}

crypto::PublicKey GetKey(const Message& message, std::string_view field) {
  return crypto::DecodePublicKey(message.GetBytes(field));
}

void PutCircuit(Message& message, const directory::Circuit& circuit) {
  message.SetInt("epoch", static_cast<std::int64_t>(circuit.epoch));
  for (const auto& hop : circuit.hops) {
    message.Set("hop", hop.pseudonym.str());
    PutKey(message, "hop_key", hop.key);
  }
}

directory::Circuit GetCircuit(const Message& message) {
  directory::Circuit circuit;
  circuit.epoch = static_cast<std::uint64_t>(message.GetInt("epoch"));
  std::vector<Pseudonym> names;
  std::vector<crypto::PublicKey> keys;
  for (const auto& [name, value] : message.fields) {
    if (name == "hop") names.emplace_back(ToString(value));
    if (name == "hop_key") keys.push_back(crypto::DecodePublicKey(value));
  }
  if (names.size() != keys.size() || names.empty()) {
    throw Error(ErrorCode::kCorrupt, "circuit hops and keys do not pair up");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    circuit.hops.push_back({names[i], keys[i]});
  }
  return circuit;
}

Message ToMessage(const ServiceOrder& order) {
  Message m("service_order");
  m.Set("token_id", order.token_id.str());
  m.Set("session_id", order.session_id.str());
  m.SetInt("service_number", order.service_number);
  m.SetInt("quantity", order.quantity);
  m.Set("job", order.job);
  PutCircuit(m, order.circuit);
  m.Set("agent_hop", order.agent_hop.str());
  PutKey(m, "agent_key", order.agent_key);
  PutKey(m, "reply_key", order.reply_key);
  return m;
}

ServiceOrder OrderFromMessage(const Message& m) {
  if (m.kind != "service_order") {
    throw Error(ErrorCode::kCorrupt, "expected service_order, got " + m.kind);
  }
  ServiceOrder order;
  order.token_id = TokenId(m.Get("token_id"));
  order.session_id = SessionId(m.Get("session_id"));
  order.service_number = m.GetInt("service_number");
  order.quantity = m.GetInt("quantity");
  order.job = m.Get("job");
  order.circuit = GetCircuit(m);
  order.agent_hop = Pseudonym(m.Get("agent_hop"));
  order.agent_key = GetKey(m, "agent_key");
  order.reply_key = GetKey(m, "reply_key");
  return order;
}

}  // namespace anoncloud::protocol
