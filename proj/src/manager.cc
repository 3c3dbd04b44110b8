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

#include "anoncloud/manager.h"

#include <limits>

#include "anoncloud/error.h"

namespace anoncloud::manager {

using simnet::SecretKind;

std::string_view PaymentModeName(PaymentMode mode) {
  return mode == PaymentMode::kPrepaid ? "prepaid" : "postpaid";
}

PaymentMode ParsePaymentMode(std::string_view name) {
  if (name == "prepaid") return PaymentMode::kPrepaid;
  if (name == "postpaid") return PaymentMode::kPostpaid;
  throw Error(ErrorCode::kConfig,
              "payment_mode must be prepaid or postpaid, got '" +
                  std::string(name) + "'");
}

void ServiceCatalog::Add(std::int64_t service_number, CatalogEntry entry) {
  if (entry.unit_price < 0) {
    throw Error(ErrorCode::kPrecondition,
                "negative unit price for service " +
                    std::to_string(service_number));
  }
  if (!entries_.emplace(service_number, std::move(entry)).second) {
    throw Error(ErrorCode::kPrecondition,
                "service number " + std::to_string(service_number) +
                    " listed twice");
  }
}

const CatalogEntry& ServiceCatalog::Get(std::int64_t service_number) const {
  auto it = entries_.find(service_number);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownService,
                "service number " + std::to_string(service_number));
  }
  return it->second;
}

std::string_view TokenStateName(TokenState state) {
  switch (state) {
    case TokenState::kIssued: return "issued";
    case TokenState::kRedeemed: return "redeemed";
    case TokenState::kExpired: return "expired";
  }
  return "?";
}

Token TokenLedger::Issue(const TokenId& id, std::int64_t service_number) {
  Token token{id, service_number, TokenState::kIssued};
  if (!tokens_.emplace(id, token).second) {
    throw Error(ErrorCode::kPrecondition, "token " + id.str() + " reissued");
  }
  return token;
}

Token TokenLedger::Redeem(const TokenId& id) {
  auto it = tokens_.find(id);
  if (it == tokens_.end()) {
    throw Error(ErrorCode::kAccessDenied, "token " + id.str() + " unknown");
  }
  if (it->second.state != TokenState::kIssued) {
    throw Error(ErrorCode::kTokenReplay,
                "token " + id.str() + " is " +
                    std::string(TokenStateName(it->second.state)));
  }
  it->second.state = TokenState::kRedeemed;
  return it->second;
}

void TokenLedger::Expire(const TokenId& id) {
  auto it = tokens_.find(id);
  if (it != tokens_.end() && it->second.state == TokenState::kIssued) {
    it->second.state = TokenState::kExpired;
  }
}

const Token* TokenLedger::Find(const TokenId& id) const {
  auto it = tokens_.find(id);
  return it == tokens_.end() ? nullptr : &it->second;
}

std::string_view AgentStateName(AgentState state) {
  switch (state) {
    case AgentState::kPreparing: return "preparing";
    case AgentState::kServing: return "serving";
    case AgentState::kAwaitingPayment: return "awaiting_payment";
    case AgentState::kKilled: return "killed";
  }
  return "?";
}

AgentProcess::AgentProcess(ProcessId process_id, SessionId session_id,
                           WorkingState working)
    : process_id_(std::move(process_id)),
      session_id_(std::move(session_id)),
      working_(std::move(working)) {}

WorkingState& AgentProcess::working_state() {
  if (!working_) {
    throw Error(ErrorCode::kDeadAgent, "agent " + process_id_.str() + " killed");
  }
  return *working_;
}

const WorkingState& AgentProcess::working_state() const {
  return const_cast<AgentProcess*>(this)->working_state();
}

void AgentProcess::Transition(AgentState next) {
  if (state_ == AgentState::kKilled) {
    throw Error(ErrorCode::kDeadAgent, "agent " + process_id_.str() + " killed");
  }
  if (next == AgentState::kPreparing && state_ != AgentState::kPreparing) {
    throw Error(ErrorCode::kPrecondition, "agent cannot return to preparing");
  }
  if (next == AgentState::kKilled) {
    Kill();
    return;
  }
  state_ = next;
}

void AgentProcess::Kill() {
  state_ = AgentState::kKilled;
  working_.reset();
}

std::int64_t BillTotal(std::span<const LineItem> items) {
  std::int64_t total = 0;
  for (const LineItem& item : items) {
    std::int64_t line = 0;
    if (__builtin_mul_overflow(item.quantity, item.unit_price, &line) ||
        __builtin_add_overflow(total, line, &total)) {
      throw Error(ErrorCode::kPrecondition, "bill total overflows");
    }
  }
  return total;
}

Message PaymentOpenMessage(const PaymentSession& session) {
  Message m("payment_open");
  m.Set("payment_handle", session.handle.str());
  m.Set("token_id", session.token_id.str());
  m.SetInt("amount", session.amount);
  return m;
}

Manager::Manager(crypto::KeyPair keys, ServiceCatalog catalog,
                 TokenLedger& ledger, PaymentMode mode, Peers peers, Prng prng,
                 simnet::Probe probe)
    : keys_(std::move(keys)),
      catalog_(std::move(catalog)),
      ledger_(ledger),
      mode_(mode),
      peers_(std::move(peers)),
      prng_(std::move(prng)),
      probe_(std::move(probe)) {}

std::string Manager::FreshId(std::string_view prefix) {
  return std::string(prefix) + prng_.Hex(8);
}

ServiceGrant Manager::HandleServiceRequest(const crypto::SealedBox& box,
                                           const Address& customer) {
  Message request = DecodeMessage(crypto::Open(box, keys_));
  if (request.kind != "service_request") {
    throw Error(ErrorCode::kCorrupt, "expected service_request, got " + request.kind);
  }
  const std::int64_t service_number = request.GetInt("service_number");
  catalog_.Get(service_number);
  const std::int64_t quantity =
      request.Has("quantity") ? request.GetInt("quantity") : 1;
  if (quantity < 0) {
    throw Error(ErrorCode::kPrecondition, "negative quantity");
  }

  SessionId session(FreshId("s-"));
  ProcessId process(FreshId("p-"));
  Token token = ledger_.Issue(TokenId(FreshId("t-")), service_number);

  WorkingState working;
  working.customer = customer;
  working.reply_key = protocol::GetKey(request, "reply_key");
  working.agent_key = probe_.SessionKey("manager", session, prng_);
  working.token_id = token.token_id;
  working.service_number = service_number;
  working.quantity = quantity;

  probe_.Secret(SecretKind::kSessionId, session.str(), session);
  probe_.Secret(SecretKind::kProcessId, process.str(), session);
  probe_.Secret(SecretKind::kTokenId, token.token_id.str(), session);
  probe_.Secret(SecretKind::kSessionKey, working.agent_key.key_id.str(), session);

  ServiceGrant grant{token, process, session, working.agent_key.public_part};
  agents_.emplace(process, AgentProcess(process, session, std::move(working)));
  probe_.Event("agent-spawned", session, process.str());
  return grant;
}

AgentProcess& Manager::LiveAgent(const ProcessId& agent) {
  auto it = agents_.find(agent);
  if (it == agents_.end()) {
    throw Error(ErrorCode::kDeadAgent, "no live agent " + agent.str());
  }
  return it->second;
}

const AgentProcess* Manager::FindAgent(const ProcessId& agent) const {
  auto it = agents_.find(agent);
  return it == agents_.end() ? nullptr : &it->second;
}

AgentProcess* Manager::AgentByKey(const KeyId& key) {
  for (auto& [id, agent] : agents_) {
    if (agent.working_state().agent_key.key_id == key) return &agent;
  }
  return nullptr;
}

crypto::SealedBox Manager::ForwardToMn(const ProcessId& agent_id,
                                       const TokenId& token,
                                       const protocol::ServiceOrder& order,
                                       const crypto::PublicKey& mn_key) {
  AgentProcess& agent = LiveAgent(agent_id);
  if (agent.state() != AgentState::kPreparing &&
      agent.state() != AgentState::kServing) {
    throw Error(ErrorCode::kPrecondition,
                "agent " + agent_id.str() + " is " +
                    std::string(AgentStateName(agent.state())));
  }
  const Token* issued = ledger_.Find(token);
  if (issued == nullptr) {
    throw Error(ErrorCode::kAccessDenied, "token " + token.str() + " unknown");
  }
  if (issued->state != TokenState::kIssued) {
    throw Error(ErrorCode::kTokenReplay,
                "token " + token.str() + " is " +
                    std::string(TokenStateName(issued->state)));
  }
  crypto::SealedBox box =
      crypto::Seal(EncodeMessage(protocol::ToMessage(order)), mn_key);
  agent.Transition(AgentState::kServing);
  return box;
}

Bill Manager::ComputeBill(
    const SessionId& session,
    std::span<const std::pair<std::int64_t, std::int64_t>> completed) const {
  Bill bill;
  bill.session_id = session;
  for (const auto& [service_number, quantity] : completed) {
    bill.items.push_back(
        {service_number, quantity, catalog_.Get(service_number).unit_price});
  }
  bill.total = BillTotal(bill.items);
  return bill;
}

PaymentSession Manager::RedirectToBank(const ProcessId& agent_id,
                                       const Bill& bill) {
  if (bill.total < 0) {
    throw Error(ErrorCode::kPrecondition, "negative bill total");
  }
  AgentProcess& agent = LiveAgent(agent_id);
  WorkingState& working = agent.working_state();
  PaymentSession session{PaymentHandle(FreshId("h-")), working.token_id,
                         bill.total};
  working.bill = bill;
  working.payment = session;
  payments_.emplace(session.handle, std::make_pair(agent_id, session));
  probe_.Secret(SecretKind::kPaymentHandle, session.handle.str(),
                agent.session_id());
  probe_.Secret(SecretKind::kAmount, std::to_string(bill.total),
                agent.session_id());
  return session;
}

std::optional<AgentProcess> Manager::OnPaymentNotification(
    const PaymentNotification& notification, std::uint64_t tick) {
  auto it = payments_.find(notification.handle);
  if (it == payments_.end()) {
    throw Error(ErrorCode::kUnknownPayment,
                "payment handle " + notification.handle.str());
  }
  const auto [agent_id, session] = it->second;
  if (notification.token_id != session.token_id ||
      notification.amount != session.amount) {
    throw Error(ErrorCode::kUnknownPayment,
                "notification does not match payment session " +
                    notification.handle.str());
  }
  payments_.erase(it);
  records_.push_back({session.token_id, session.amount, notification.reference,
                      tick});
  AgentProcess& agent = LiveAgent(agent_id);
  agent.working_state().paid = true;
  if (mode_ == PaymentMode::kPostpaid) return KillAgent(agent_id);
  return std::nullopt;
}

AgentProcess Manager::KillAgent(const ProcessId& agent_id) {
  auto node = agents_.extract(agent_id);
  if (node.empty()) {
    throw Error(ErrorCode::kDeadAgent, "no live agent " + agent_id.str());
  }
  AgentProcess agent = std::move(node.mapped());
  const WorkingState& working = agent.working_state();
  ledger_.Expire(working.token_id);
  if (working.payment) payments_.erase(working.payment->handle);
  agent.Kill();
  probe_.Event("agent-killed", agent.session_id(), agent.process_id().str());
  return agent;
}

std::vector<simnet::StoreEntry> Manager::StoreDump() const {
  std::vector<simnet::StoreEntry> out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const BillingRecord& r = records_[i];
    out.push_back({i, "token_id", r.token_id.str()});
    out.push_back({i, "amount", std::to_string(r.amount)});
    out.push_back({i, "payment_reference", r.payment_reference.str()});
    out.push_back({i, "timestamp", std::to_string(r.timestamp)});
  }
  return out;
}

void Manager::SendSealed(const Address& to, const Message& message,
                         const crypto::PublicKey& key, const SessionId& session,
                         simnet::Network& network, const Address& from) {
  simnet::Envelope envelope;
  envelope.from = from;
  envelope.to = to;
  envelope.kind = simnet::BodyKind::kSealed;
  envelope.body = crypto::Encode(crypto::Seal(EncodeMessage(message), key));
  envelope.session = session;
  network.Send(std::move(envelope));
}

void Manager::OnEnvelope(const simnet::Envelope& envelope,
                         simnet::Network& network) {
  try {
    if (envelope.kind == simnet::BodyKind::kOnion) {
      crypto::OnionPacket packet = crypto::DecodeOnion(envelope.body);
      AgentProcess* agent = AgentByKey(packet.outer.recipient_key_id);
      if (agent == nullptr) {
        throw Error(ErrorCode::kDeadAgent, "onion for no live agent");
      }
      OnResultOnion(*agent, packet, network);
      return;
    }
    crypto::SealedBox box = crypto::DecodeSealedBox(envelope.body);
    if (box.recipient_key_id == keys_.key_id) {
      Message message = DecodeMessage(crypto::Open(box, keys_));
      if (message.kind == "service_request") {
        ServiceGrant grant = HandleServiceRequest(box, envelope.from);
        AgentProcess& agent = LiveAgent(grant.process_id);
        const WorkingState& working = agent.working_state();

        Message reply("token_grant");
        reply.Set("token_id", grant.token.token_id.str());
        reply.Set("process_id", grant.process_id.str());
        reply.Set("session_id", grant.session_id.str());
        protocol::PutKey(reply, "agent_key", grant.agent_key);
        SendSealed(working.customer, reply, working.reply_key,
                   grant.session_id, network, protocol::ManagerAddress());

        Message circuit_request("circuit_request");
        circuit_request.SetInt("service_number", working.service_number);
        protocol::PutKey(circuit_request, "agent_key", grant.agent_key);
        SendSealed(protocol::DirectoryAddress(), circuit_request,
                   peers_.directory, grant.session_id, network,
                   protocol::ManagerAddress());

        if (mode_ == PaymentMode::kPrepaid) {
          agent.working_state().completed.emplace_back(working.service_number,
                                                       working.quantity);
          IssueBill(agent, network);
        }
        return;
      }
      OnManagerMessage(message, envelope.from, network);
      return;
    }
    AgentProcess* agent = AgentByKey(box.recipient_key_id);
    if (agent == nullptr) {
      throw Error(ErrorCode::kDeadAgent, "sealed box for no live agent");
    }
    Message message =
        DecodeMessage(crypto::Open(box, agent->working_state().agent_key));
    OnAgentMessage(*agent, message, network);
  } catch (const Error& e) {
    probe_.Event("manager-error", envelope.session, e.what());
  }
}

void Manager::OnManagerMessage(const Message& message, const Address&,
                               simnet::Network& network) {
  if (message.kind != "payment_notification") {
    throw Error(ErrorCode::kCorrupt, "unexpected " + message.kind);
  }
  PaymentNotification notification{
      PaymentHandle(message.Get("payment_handle")),
      PaymentReference(message.Get("payment_reference")),
      TokenId(message.Get("token_id")), message.GetInt("amount")};
  auto it = payments_.find(notification.handle);
  if (it == payments_.end()) {
    throw Error(ErrorCode::kUnknownPayment,
                "payment handle " + notification.handle.str());
  }
  const ProcessId agent_id = it->second.first;
  const AgentProcess& agent = LiveAgent(agent_id);
  const SessionId session = agent.session_id();
  const Address customer = agent.working_state().customer;
  const crypto::PublicKey reply_key = agent.working_state().reply_key;

  if (OnPaymentNotification(notification, network.now())) {
    Message teardown("teardown");
    teardown.Set("status", "closed");
    SendSealed(customer, teardown, reply_key, session, network,
               protocol::ManagerAddress());
    return;
  }
  AgentProcess& live = LiveAgent(agent_id);
  TryForward(live, network);
  TryClose(live, network);
}

void Manager::OnAgentMessage(AgentProcess& agent, const Message& message,
                             simnet::Network& network) {
  WorkingState& working = agent.working_state();
  if (message.kind == "job_submit") {
    if (ProcessId(message.Get("process_id")) != agent.process_id()) {
      throw Error(ErrorCode::kAccessDenied, "job for another process");
    }
    working.job = message.Get("job");
    TryForward(agent, network);
  } else if (message.kind == "circuit") {
    working.circuit = protocol::GetCircuit(message);
    TryForward(agent, network);
  } else if (message.kind == "service_complete") {
    if (mode_ == PaymentMode::kPostpaid) {
      working.completed.emplace_back(message.GetInt("service_number"),
                                     message.GetInt("quantity"));
      IssueBill(agent, network);
    }
  } else if (message.kind == "ack") {
    if (ProcessId(message.Get("process_id")) != agent.process_id()) {
      throw Error(ErrorCode::kAccessDenied, "ack for another process");
    }
    working.acked = true;
    TryClose(agent, network);
  } else {
    throw Error(ErrorCode::kCorrupt, "unexpected " + message.kind);
  }
}

void Manager::OnResultOnion(AgentProcess& agent,
                            const crypto::OnionPacket& packet,
                            simnet::Network& network) {
  WorkingState& working = agent.working_state();
  crypto::PeelResult peeled = crypto::Peel(packet, working.agent_key);
  if (!peeled.terminal()) {
    throw Error(ErrorCode::kRoutingError, "agent is not a relay");
  }
  Message delivery = DecodeMessage(peeled.payload);
  if (delivery.kind != "result_delivery") {
    throw Error(ErrorCode::kCorrupt, "expected result_delivery");
  }
  simnet::Envelope out;
  out.from = protocol::ManagerAddress();
  out.to = working.customer;
  out.kind = simnet::BodyKind::kSealed;
  out.body = delivery.GetBytes("sealed");
  out.session = agent.session_id();
  network.Send(std::move(out));
  working.result_delivered = true;
  TryClose(agent, network);
}

void Manager::TryForward(AgentProcess& agent, simnet::Network& network) {
  WorkingState& working = agent.working_state();
  if (working.forwarded || !working.job || !working.circuit) return;
  if (mode_ == PaymentMode::kPrepaid && !working.paid) return;

  protocol::ServiceOrder order;
  order.token_id = working.token_id;
  order.session_id = agent.session_id();
  order.service_number = working.service_number;
  order.quantity = working.quantity;
  order.job = *working.job;
  order.circuit = *working.circuit;
  order.agent_hop = Pseudonym(protocol::ManagerAddress().str());
  order.agent_key = working.agent_key.public_part;
  order.reply_key = working.reply_key;

  const crypto::PublicKey& mn_key = working.circuit->master().key;
  crypto::SealedBox box =
      ForwardToMn(agent.process_id(), working.token_id, order, mn_key);
  crypto::OnionPacket onion =
      crypto::WrapOnion(crypto::Encode(box), working.circuit->hops);

  simnet::Envelope out;
  out.from = protocol::ManagerAddress();
  out.to = Address(working.circuit->hops.front().pseudonym.str());
  out.kind = simnet::BodyKind::kOnion;
  out.body = crypto::Encode(onion);
  out.link = prng_.Next();
  out.session = agent.session_id();
  network.Send(std::move(out));
  working.forwarded = true;
}

void Manager::IssueBill(AgentProcess& agent, simnet::Network& network) {
  WorkingState& working = agent.working_state();
  class Bill bill = ComputeBill(agent.session_id(), working.completed);
  if (mode_ == PaymentMode::kPostpaid) {
    agent.Transition(AgentState::kAwaitingPayment);
  }
  PaymentSession session = RedirectToBank(agent.process_id(), bill);

  SendSealed(protocol::BankAddress(), PaymentOpenMessage(session),
             peers_.bank, agent.session_id(), network,
             protocol::ManagerAddress());

  Message message("bill");
  message.Set("payment_handle", session.handle.str());
  message.Set("session_id", agent.session_id().str());
  message.SetInt("total", bill.total);
  for (const LineItem& item : bill.items) {
    message.Set("item", std::to_string(item.service_number) + "x" +
                            std::to_string(item.quantity) + "@" +
                            std::to_string(item.unit_price));
  }
  SendSealed(working.customer, message, working.reply_key, agent.session_id(),
             network, protocol::ManagerAddress());
}

void Manager::TryClose(AgentProcess& agent, simnet::Network& network) {
  const WorkingState& working = agent.working_state();
  if (mode_ != PaymentMode::kPrepaid) return;
  if (working.paid && working.result_delivered && working.acked) {
    Close(agent, network);
  }
}

void Manager::Close(AgentProcess& agent, simnet::Network& network) {
  const WorkingState& working = agent.working_state();
  Message teardown("teardown");
  teardown.Set("status", "closed");
  SendSealed(working.customer, teardown, working.reply_key, agent.session_id(),
             network, protocol::ManagerAddress());
  KillAgent(agent.process_id());
}

}  // namespace anoncloud::manager
