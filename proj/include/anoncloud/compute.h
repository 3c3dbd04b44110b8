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

#ifndef ANONCLOUD_COMPUTE_H_
#define ANONCLOUD_COMPUTE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/directory.h"
#include "anoncloud/ids.h"
#include "anoncloud/job.h"
#include "anoncloud/manager.h"
#include "anoncloud/message.h"
#include "anoncloud/prng.h"
#include "anoncloud/probe.h"
#include "anoncloud/protocol.h"
#include "anoncloud/simnet.h"

namespace anoncloud::compute {

struct ServiceJob {
  std::int64_t service_number = 0;
  std::string payload;
};

struct SubService {
  SessionId parent;
  std::size_t index = 0;
  std::string sub_payload;
  Pseudonym assigned_pseudonym;

  friend bool operator==(const SubService&, const SubService&) = default;
};

enum class MnState { kAuthenticating, kDispatching, kAggregating, kDone };

std::string_view MnStateName(MnState state);

struct MnSession {
  SessionId session_id;
  TokenId token_id;
  directory::Circuit circuit;
  // Outer optional: slot filled. Inner: the partial value, empty for min/max
  // over an empty chunk.
  std::vector<std::optional<std::optional<JobValue>>> sub_results;
  MnState state = MnState::kAuthenticating;
  std::vector<MnState> history;
  protocol::ServiceOrder order;
  std::optional<JobValue> result;

  bool slots_filled() const;
};

// Splits the job's items into `n_parts` contiguous chunks, earlier chunks
// taking the remainder, and assigns chunk i to sns[i % sns.size()]. Throws
// kPrecondition for n_parts == 0, kCapacity when n_parts exceeds sns.size(),
// kEvalError for a malformed job.
std::vector<SubService> Decompose(const ServiceJob& job, std::size_t n_parts,
                                  std::span<const Pseudonym> sns,
                                  const SessionId& parent = {});

// Concatenates the sub-payloads in index order back into one job text.
std::string Recompose(std::span<const SubService> subs);

// Throws kEvalError on a malformed sub-payload.
std::optional<JobValue> SnExecute(const SubService& sub);

// Peels one layer. Throws kWrongRecipient for a packet meant for another key
// and kRoutingError when the next hop fails `routable`.
crypto::PeelResult SnRelay(const crypto::OnionPacket& packet,
                           const crypto::KeyPair& kp,
                           const std::function<bool(const Pseudonym&)>& routable);

class MasterNode : public simnet::Actor {
 public:
  // parts == 0 splits each job across every slave hop of its circuit.
  MasterNode(crypto::KeyPair keys, manager::TokenLedger& ledger,
             std::uint64_t epoch, Prng prng, simnet::Probe probe = {},
             std::size_t parts = 0);

  // Opens a service order and redeems its token. Throws kWrongRecipient,
  // kTokenReplay, kAccessDenied or kCorrupt.
  MnSession& Authenticate(const crypto::SealedBox& box);

  std::vector<SubService> Plan(const SessionId& session) const;

  // Sends every sub-service along the reverse circuit to its assigned slave
  // and moves the session to Aggregating. Throws kStaleCircuit when the
  // circuit predates the current epoch, kPrecondition outside Dispatching.
  void Dispatch(const SessionId& session, std::span<const SubService> subs,
                simnet::Network& network);

  // Fills one result slot; completes the session when all are filled.
  // Throws kSubJobError when the slave reported a failure.
  void Accept(const SessionId& session, std::size_t index,
              const Message& sub_result);

  // Completion message for the session's agent. Throws kNotReady unless Done.
  crypto::SealedBox NotifyManager(const SessionId& session) const;

  void SetEpoch(std::uint64_t epoch) { epoch_ = epoch; }
  std::uint64_t epoch() const { return epoch_; }
  const MnSession* FindSession(const SessionId& session) const;
  const crypto::PublicKey& public_key() const { return keys_.public_part; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  struct PendingSub {
    SessionId session;
    std::size_t index = 0;
  };

  MnSession& Live(const SessionId& session);
  void Enter(MnSession& session, MnState state);
  void Finish(MnSession& session, simnet::Network& network);

  crypto::KeyPair keys_;
  manager::TokenLedger& ledger_;
  std::uint64_t epoch_;
  Prng prng_;
  simnet::Probe probe_;
  std::size_t parts_;
  std::map<SessionId, MnSession> sessions_;
  std::unordered_map<std::uint64_t, PendingSub> links_;
};

class SlaveNode : public simnet::Actor {
 public:
  SlaveNode(TrueId true_id, crypto::KeyPair keys, crypto::PublicKey mn_key,
            Prng prng, simnet::Probe probe = {});

  const TrueId& true_id() const { return true_id_; }
  const crypto::PublicKey& public_key() const { return keys_.public_part; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  struct ReturnLink {
    Address previous;
    std::uint64_t link = 0;
  };

  void Relay(const simnet::Envelope& envelope, simnet::Network& network);
  void Execute(const simnet::Envelope& envelope, const Bytes& payload,
               simnet::Network& network);
  void Return(const simnet::Envelope& envelope, simnet::Network& network);

  TrueId true_id_;
  crypto::KeyPair keys_;
  crypto::PublicKey mn_key_;
  Prng prng_;
  simnet::Probe probe_;
  std::unordered_map<std::uint64_t, ReturnLink> links_;
};

}  // namespace anoncloud::compute

#endif  // ANONCLOUD_COMPUTE_H_
