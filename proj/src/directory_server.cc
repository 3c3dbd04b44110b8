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

#include "anoncloud/directory_server.h"

#include "anoncloud/error.h"
#include "anoncloud/message.h"
#include "anoncloud/protocol.h"

namespace anoncloud::directory {

using simnet::SecretKind;

DirectoryServer::DirectoryServer(Directory& directory, crypto::KeyPair keys,
                                 std::size_t circuit_length, Prng circuit_prng,
                                 Prng rotation_prng, simnet::Probe probe)
    : directory_(directory),
      keys_(std::move(keys)),
      circuit_length_(circuit_length),
      circuit_prng_(std::move(circuit_prng)),
      rotation_prng_(std::move(rotation_prng)),
      probe_(std::move(probe)) {}

PseudonymMapping DirectoryServer::Rotate(simnet::Network& network) {
  PseudonymMapping mapping = directory_.RotatePseudonyms(rotation_prng_);
  for (const auto& [before, after] : mapping) {
    if (network.IsRegistered(Address(before.str()))) {
      network.Rebind(Address(before.str()), Address(after.str()));
    }
  }
  for (const auto& [true_id, record] : directory_.nodes()) {
    probe_.Secret(SecretKind::kPseudonym, record.pseudonym.str(), {},
                  true_id.str());
  }
  probe_.Event("rotation", {}, std::to_string(directory_.epoch().epoch_number));
  if (auto master = directory_.master()) {
    Message notice("rotation");
    notice.SetInt("epoch", static_cast<std::int64_t>(directory_.epoch().epoch_number));
    simnet::Envelope out;
    out.from = protocol::DirectoryAddress();
    out.to = Address(master->pseudonym.str());
    out.kind = simnet::BodyKind::kSealed;
    out.body = crypto::Encode(crypto::Seal(EncodeMessage(notice), master->public_key));
    network.Send(std::move(out));
  }
  return mapping;
}

void DirectoryServer::OnEnvelope(const simnet::Envelope& envelope,
                                 simnet::Network& network) {
  try {
    Message request =
        DecodeMessage(crypto::Open(crypto::DecodeSealedBox(envelope.body), keys_));
    if (request.kind != "circuit_request") {
      throw Error(ErrorCode::kCorrupt, "unexpected " + request.kind);
    }
    // Fixed-role addresses double as principal names for the trust check.
    directory_.CurrentList(envelope.from.str());
    auto master = directory_.master();
    if (!master) throw Error(ErrorCode::kNotReady, "no master registered");

    Circuit circuit = directory_.BuildCircuit(
        {request.GetInt("service_number")}, *master, circuit_length_,
        circuit_prng_);
    for (const auto& hop : circuit.hops) {
      const NodeRecord* node = directory_.FindByPseudonym(hop.pseudonym);
      probe_.Secret(SecretKind::kPseudonym, hop.pseudonym.str(),
                    envelope.session, node ? node->true_id.str() : "");
    }
    std::string hops;
    for (const auto& hop : circuit.hops) hops += (hops.empty() ? "" : ",") + hop.pseudonym.str();
    probe_.Event("circuit-issued", envelope.session,
                 std::to_string(circuit.epoch) + ":" + hops);

    Message reply("circuit");
    protocol::PutCircuit(reply, circuit);
    simnet::Envelope out;
    out.from = protocol::DirectoryAddress();
    out.to = envelope.from;
    out.kind = simnet::BodyKind::kSealed;
    out.body = crypto::Encode(
        crypto::Seal(EncodeMessage(reply), protocol::GetKey(request, "agent_key")));
    network.Send(std::move(out));
  } catch (const Error& e) {
    probe_.Event("ds-error", envelope.session, e.what());
  }
}

}  // namespace anoncloud::directory
