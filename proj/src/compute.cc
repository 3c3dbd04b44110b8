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

#include "anoncloud/compute.h"

#include "anoncloud/error.h"

namespace anoncloud::compute {

using simnet::SecretKind;

std::string_view MnStateName(MnState state) {
  switch (state) {
    case MnState::kAuthenticating: return "authenticating";
    case MnState::kDispatching: return "dispatching";
    case MnState::kAggregating: return "aggregating";
    case MnState::kDone: return "done";
  }
  return "?";
}

bool MnSession::slots_filled() const {
  for (const auto& slot : sub_results) {
    if (!slot) return false;
  }
  return true;
}

std::vector<SubService> Decompose(const ServiceJob& job, std::size_t n_parts,
                                  std::span<const Pseudonym> sns,
                                  const SessionId& parent) {
  if (n_parts == 0) {
    throw Error(ErrorCode::kPrecondition, "n_parts must be at least 1");
  }
  if (n_parts > sns.size()) {
    throw Error(ErrorCode::kCapacity,
                std::to_string(n_parts) + " parts over " +
                    std::to_string(sns.size()) + " slave nodes");
  }
  JobExpr whole = ParseJob(job.payload);
  const std::size_t n = whole.items.size();
  std::vector<SubService> subs;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < n_parts; ++i) {
    std::size_t size = n / n_parts + (i < n % n_parts ? 1 : 0);
    JobExpr chunk{whole.op, {whole.items.begin() + begin,
                             whole.items.begin() + begin + size}};
    begin += size;
    subs.push_back({parent, i, FormatJob(chunk), sns[i % sns.size()]});
  }
  return subs;
}

std::string Recompose(std::span<const SubService> subs) {
  if (subs.empty()) {
    throw Error(ErrorCode::kPrecondition, "nothing to recompose");
  }
  JobExpr whole;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    JobExpr part = ParseJob(subs[i].sub_payload);
    if (i == 0) whole.op = part.op;
    if (part.op != whole.op) {
      throw Error(ErrorCode::kEvalError, "sub-services disagree on the operation");
    }
    whole.items.insert(whole.items.end(), part.items.begin(), part.items.end());
  }
  return FormatJob(whole);
}

std::optional<JobValue> SnExecute(const SubService& sub) {
  return EvaluatePartial(ParseJob(sub.sub_payload));
}

crypto::PeelResult SnRelay(
    const crypto::OnionPacket& packet, const crypto::KeyPair& kp,
    const std::function<bool(const Pseudonym&)>& routable) {
  crypto::PeelResult peeled = crypto::Peel(packet, kp);
  if (!peeled.terminal() && !routable(*peeled.next_hop)) {
    throw Error(ErrorCode::kRoutingError,
                "next hop " + peeled.next_hop->str() + " is not reachable");
  }
  return peeled;
}

MasterNode::MasterNode(crypto::KeyPair keys, manager::TokenLedger& ledger,
                       std::uint64_t epoch, Prng prng, simnet::Probe probe,
                       std::size_t parts)
    : keys_(std::move(keys)),
      ledger_(ledger),
      epoch_(epoch),
      prng_(std::move(prng)),
      probe_(std::move(probe)),
      parts_(parts) {}

void MasterNode::Enter(MnSession& session, MnState state) {
  session.state = state;
  session.history.push_back(state);
  probe_.Event("mn-state", session.session_id, std::string(MnStateName(state)));
}

MnSession& MasterNode::Authenticate(const crypto::SealedBox& box) {
  protocol::ServiceOrder order =
      protocol::OrderFromMessage(DecodeMessage(crypto::Open(box, keys_)));
  probe_.Event("mn-auth", order.session_id, order.token_id.str());
  ledger_.Redeem(order.token_id);

  MnSession fresh;
  fresh.session_id = order.session_id;
  fresh.token_id = order.token_id;
  fresh.circuit = order.circuit;
  fresh.order = std::move(order);
  auto [it, inserted] = sessions_.emplace(fresh.session_id, std::move(fresh));
  if (!inserted) {
    throw Error(ErrorCode::kTokenReplay,
                "session " + it->first.str() + " already served");
  }
  Enter(it->second, MnState::kAuthenticating);
  Enter(it->second, MnState::kDispatching);
  return it->second;
}

MnSession& MasterNode::Live(const SessionId& session) {
  auto it = sessions_.find(session);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kUnknownSession, "session " + session.str());
  }
  return it->second;
}

const MnSession* MasterNode::FindSession(const SessionId& session) const {
  auto it = sessions_.find(session);
  return it == sessions_.end() ? nullptr : &it->second;
}

std::vector<SubService> MasterNode::Plan(const SessionId& id) const {
  const MnSession* session = FindSession(id);
  if (session == nullptr) {
    throw Error(ErrorCode::kUnknownSession, "session " + id.str());
  }
  std::vector<Pseudonym> sns;
  for (const auto& hop : session->circuit.slave_hops()) sns.push_back(hop.pseudonym);
  return Decompose({session->order.service_number, session->order.job},
                   parts_ == 0 ? sns.size() : parts_, sns, id);
}

void MasterNode::Dispatch(const SessionId& id, std::span<const SubService> subs,
                          simnet::Network& network) {
  MnSession& session = Live(id);
  if (session.state != MnState::kDispatching) {
    throw Error(ErrorCode::kPrecondition,
                "session " + id.str() + " is " +
                    std::string(MnStateName(session.state)));
  }
  if (session.circuit.epoch != epoch_) {
    throw Error(ErrorCode::kStaleCircuit,
                "circuit from epoch " + std::to_string(session.circuit.epoch) +
                    ", current " + std::to_string(epoch_));
  }
  const auto& hops = session.circuit.hops;
  session.sub_results.assign(subs.size(), std::nullopt);
  for (const SubService& sub : subs) {
    std::size_t target = hops.size();
    for (std::size_t j = 0; j + 1 < hops.size(); ++j) {
      if (hops[j].pseudonym == sub.assigned_pseudonym) target = j;
    }
    if (target == hops.size()) {
      throw Error(ErrorCode::kRoutingError,
                  sub.assigned_pseudonym.str() + " is not on the circuit");
    }
    // Reverse segment from the hop next to the master down to the target.
    std::vector<crypto::Hop> route;
    for (std::size_t j = hops.size() - 1; j-- > target;) route.push_back(hops[j]);

    Message message("sub_job");
    message.SetInt("index", static_cast<std::int64_t>(sub.index));
    message.Set("sub_job", sub.sub_payload);
    probe_.Secret(SecretKind::kSubPayload, sub.sub_payload, id,
                  sub.assigned_pseudonym.str());

    simnet::Envelope out;
    out.from = Address(hops.back().pseudonym.str());
    out.to = Address(route.front().pseudonym.str());
    out.kind = simnet::BodyKind::kOnion;
    out.body = crypto::Encode(crypto::WrapOnion(EncodeMessage(message), route));
    out.link = prng_.Next();
    out.session = id;
    links_[out.link] = {id, sub.index};
    network.Send(std::move(out));
  }
  Enter(session, MnState::kAggregating);
}

void MasterNode::Accept(const SessionId& id, std::size_t index,
                        const Message& sub_result) {
  MnSession& session = Live(id);
  if (session.state != MnState::kAggregating ||
      index >= session.sub_results.size()) {
    throw Error(ErrorCode::kPrecondition, "unexpected sub-result");
  }
  if (sub_result.Has("error")) {
    throw Error(ErrorCode::kSubJobError,
                "sub-job " + std::to_string(index) + ": " +
                    sub_result.Get("error"));
  }
  session.sub_results[index] = ParseValue(sub_result.Get("sub_result"));
  if (!session.slots_filled()) return;

  std::vector<std::optional<JobValue>> parts;
  for (const auto& slot : session.sub_results) parts.push_back(*slot);
  session.result = Combine(ParseJob(session.order.job).op, parts);
  Enter(session, MnState::kDone);
}

crypto::SealedBox MasterNode::NotifyManager(const SessionId& id) const {
  const MnSession* session = FindSession(id);
  if (session == nullptr || session->state != MnState::kDone) {
    throw Error(ErrorCode::kNotReady, "session " + id.str() + " not done");
  }
  Message message("service_complete");
  message.Set("session_id", id.str());
  message.SetInt("service_number", session->order.service_number);
  message.SetInt("quantity", session->order.quantity);
  return crypto::Seal(EncodeMessage(message), session->order.agent_key);
}

void MasterNode::Finish(MnSession& session, simnet::Network& network) {
  const auto& hops = session.circuit.hops;
  const std::string value = FormatValue(session.result);
  probe_.Secret(SecretKind::kResult, value, session.session_id);

  Message result("result");
  result.Set("result", value);
  Message delivery("result_delivery");
  delivery.SetBytes("sealed",
                    crypto::Encode(crypto::Seal(EncodeMessage(result),
                                                session.order.reply_key)));

  std::vector<crypto::Hop> route;
  for (std::size_t j = hops.size() - 1; j-- > 0;) route.push_back(hops[j]);
  route.push_back({session.order.agent_hop, session.order.agent_key});

  const Address self(hops.back().pseudonym.str());
  simnet::Envelope onion;
  onion.from = self;
  onion.to = Address(route.front().pseudonym.str());
  onion.kind = simnet::BodyKind::kOnion;
  onion.body = crypto::Encode(crypto::WrapOnion(EncodeMessage(delivery), route));
  onion.link = prng_.Next();
  onion.session = session.session_id;
  network.Send(std::move(onion));

  simnet::Envelope notice;
  notice.from = self;
  notice.to = protocol::ManagerAddress();
  notice.kind = simnet::BodyKind::kSealed;
  notice.body = crypto::Encode(NotifyManager(session.session_id));
  notice.session = session.session_id;
  network.Send(std::move(notice));
}

void MasterNode::OnEnvelope(const simnet::Envelope& envelope,
                            simnet::Network& network) {
  try {
    switch (envelope.kind) {
      case simnet::BodyKind::kOnion: {
        crypto::PeelResult peeled =
            crypto::Peel(crypto::DecodeOnion(envelope.body), keys_);
        if (!peeled.terminal()) {
          throw Error(ErrorCode::kRoutingError, "master node is not a relay");
        }
        MnSession& session = Authenticate(crypto::DecodeSealedBox(peeled.payload));
        Dispatch(session.session_id, Plan(session.session_id), network);
        return;
      }
      case simnet::BodyKind::kReply: {
        auto it = links_.find(envelope.link);
        if (it == links_.end()) {
          throw Error(ErrorCode::kRoutingError, "reply on unknown link");
        }
        PendingSub pending = it->second;
        links_.erase(it);
        Message message = DecodeMessage(
            crypto::UnwrapReply(crypto::DecodeOnion(envelope.body), keys_));
        if (message.GetInt("index") != static_cast<std::int64_t>(pending.index)) {
          throw Error(ErrorCode::kCorrupt, "sub-result index mismatch");
        }
        Accept(pending.session, pending.index, message);
        MnSession& session = Live(pending.session);
        if (session.state == MnState::kDone) Finish(session, network);
        return;
      }
      case simnet::BodyKind::kSealed: {
        Message message =
            DecodeMessage(crypto::Open(crypto::DecodeSealedBox(envelope.body), keys_));
        if (message.kind != "rotation") {
          throw Error(ErrorCode::kCorrupt, "unexpected " + message.kind);
        }
        SetEpoch(static_cast<std::uint64_t>(message.GetInt("epoch")));
        return;
      }
      case simnet::BodyKind::kPlain:
        throw Error(ErrorCode::kCorrupt, "plaintext envelope");
    }
  } catch (const Error& e) {
    probe_.Event("mn-error", envelope.session, e.what());
  }
}

SlaveNode::SlaveNode(TrueId true_id, crypto::KeyPair keys,
                     crypto::PublicKey mn_key, Prng prng, simnet::Probe probe)
    : true_id_(std::move(true_id)),
      keys_(std::move(keys)),
      mn_key_(std::move(mn_key)),
      prng_(std::move(prng)),
      probe_(std::move(probe)) {}

void SlaveNode::OnEnvelope(const simnet::Envelope& envelope,
                           simnet::Network& network) {
  try {
    if (envelope.kind == simnet::BodyKind::kOnion) {
      Relay(envelope, network);
    } else if (envelope.kind == simnet::BodyKind::kReply) {
      Return(envelope, network);
    } else {
      throw Error(ErrorCode::kCorrupt, "slave nodes only carry onions");
    }
  } catch (const Error& e) {
    probe_.Event("sn-error", envelope.session, true_id_.str() + ": " + e.what());
  }
}

void SlaveNode::Relay(const simnet::Envelope& envelope,
                      simnet::Network& network) {
  crypto::PeelResult peeled =
      SnRelay(crypto::DecodeOnion(envelope.body), keys_,
              [&network](const Pseudonym& hop) {
                return network.IsRegistered(Address(hop.str()));
              });
  if (peeled.terminal()) {
    Execute(envelope, peeled.payload, network);
    return;
  }
  simnet::Envelope out;
  out.from = envelope.to;
  out.to = Address(peeled.next_hop->str());
  out.kind = simnet::BodyKind::kOnion;
  out.body = crypto::Encode(peeled.inner);
  out.link = prng_.Next();
  links_[out.link] = {envelope.from, envelope.link};
  network.Send(std::move(out));
}

void SlaveNode::Execute(const simnet::Envelope& envelope, const Bytes& payload,
                        simnet::Network& network) {
  Message request = DecodeMessage(payload);
  if (request.kind != "sub_job") {
    throw Error(ErrorCode::kCorrupt, "expected sub_job, got " + request.kind);
  }
  SubService sub;
  sub.index = static_cast<std::size_t>(request.GetInt("index"));
  sub.sub_payload = request.Get("sub_job");

  Message reply("sub_result");
  reply.SetInt("index", static_cast<std::int64_t>(sub.index));
  try {
    reply.Set("sub_result", FormatValue(SnExecute(sub)));
  } catch (const Error& e) {
    reply.Set("error", e.what());
  }
  simnet::Envelope out;
  out.from = envelope.to;
  out.to = envelope.from;
  out.kind = simnet::BodyKind::kReply;
  out.body = crypto::Encode(crypto::StartReply(EncodeMessage(reply), mn_key_));
  out.link = envelope.link;
  network.Send(std::move(out));
}

void SlaveNode::Return(const simnet::Envelope& envelope,
                       simnet::Network& network) {
  auto it = links_.find(envelope.link);
  if (it == links_.end()) {
    throw Error(ErrorCode::kRoutingError, "reply on unknown link");
  }
  ReturnLink back = it->second;
  links_.erase(it);
  simnet::Envelope out;
  out.from = envelope.to;
  out.to = back.previous;
  out.kind = simnet::BodyKind::kReply;
  out.body = crypto::Encode(
      crypto::AddReplyLayer(crypto::DecodeOnion(envelope.body), mn_key_));
  out.link = back.link;
  network.Send(std::move(out));
}

}  // namespace anoncloud::compute
