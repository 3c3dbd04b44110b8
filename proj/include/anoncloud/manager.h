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

#ifndef ANONCLOUD_MANAGER_H_
#define ANONCLOUD_MANAGER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/directory.h"
#include "anoncloud/ids.h"
#include "anoncloud/knowledge.h"
#include "anoncloud/message.h"
#include "anoncloud/prng.h"
#include "anoncloud/probe.h"
#include "anoncloud/protocol.h"
#include "anoncloud/simnet.h"

namespace anoncloud::manager {

// When the customer pays: before the job is forwarded (prepaid) or after the
// result has been delivered (postpaid).
enum class PaymentMode { kPrepaid, kPostpaid };

std::string_view PaymentModeName(PaymentMode mode);
// Throws Error(kConfig) on anything but "prepaid" or "postpaid".
PaymentMode ParsePaymentMode(std::string_view name);

struct CatalogEntry {
  std::string type;
  std::int64_t unit_price = 0;
};

class ServiceCatalog {
 public:
  // Throws kPrecondition on a repeated service number or a negative price.
  void Add(std::int64_t service_number, CatalogEntry entry);
  // Throws kUnknownService.
  const CatalogEntry& Get(std::int64_t service_number) const;
  bool Contains(std::int64_t service_number) const {
    return entries_.contains(service_number);
  }
  const std::map<std::int64_t, CatalogEntry>& entries() const {
    return entries_;
  }

 private:
  std::map<std::int64_t, CatalogEntry> entries_;
};

enum class TokenState { kIssued, kRedeemed, kExpired };

std::string_view TokenStateName(TokenState state);

struct Token {
  TokenId token_id;
  std::int64_t service_number = 0;
  TokenState state = TokenState::kIssued;

  friend bool operator==(const Token&, const Token&) = default;
};

// Credential registry shared by the issuer (manager) and the verifier
// (master node).
class TokenLedger {
 public:
  // Throws kPrecondition when the id is already known.
  Token Issue(const TokenId& id, std::int64_t service_number);
  // Issued -> Redeemed. Throws kTokenReplay for a token that is no longer
  // Issued and kAccessDenied for one that was never issued.
  Token Redeem(const TokenId& id);
  // Issued -> Expired; other states are left alone.
  void Expire(const TokenId& id);
  const Token* Find(const TokenId& id) const;
  const std::map<TokenId, Token>& tokens() const { return tokens_; }

 private:
  std::map<TokenId, Token> tokens_;
};

struct LineItem {
  std::int64_t service_number = 0;
  std::int64_t quantity = 0;
  std::int64_t unit_price = 0;

  friend bool operator==(const LineItem&, const LineItem&) = default;
};

struct Bill {
  SessionId session_id;
  std::vector<LineItem> items;
  std::int64_t total = 0;

  friend bool operator==(const Bill&, const Bill&) = default;
};

// The only thing the manager keeps once a session closes.
struct BillingRecord {
  TokenId token_id;
  std::int64_t amount = 0;
  PaymentReference payment_reference;
  std::uint64_t timestamp = 0;

  friend bool operator==(const BillingRecord&, const BillingRecord&) = default;
};

struct PaymentSession {
  PaymentHandle handle;
  TokenId token_id;
  std::int64_t amount = 0;
};

struct PaymentNotification {
  PaymentHandle handle;
  PaymentReference reference;
  TokenId token_id;
  std::int64_t amount = 0;
};

enum class AgentState { kPreparing, kServing, kAwaitingPayment, kKilled };

std::string_view AgentStateName(AgentState state);

// Per-session scratch data. Lives only as long as the agent.
struct WorkingState {
  Address customer;
  crypto::PublicKey reply_key;
  crypto::KeyPair agent_key;
  TokenId token_id;
  std::int64_t service_number = 0;
  std::int64_t quantity = 1;
  std::optional<std::string> job;
  std::optional<directory::Circuit> circuit;
  std::optional<Bill> bill;
  std::optional<PaymentSession> payment;
  std::vector<std::pair<std::int64_t, std::int64_t>> completed;
  bool forwarded = false;
  bool paid = false;
  bool result_delivered = false;
  bool acked = false;
};

class AgentProcess {
 public:
  AgentProcess(ProcessId process_id, SessionId session_id,
               WorkingState working);

  const ProcessId& process_id() const { return process_id_; }
  const SessionId& session_id() const { return session_id_; }
  AgentState state() const { return state_; }

  // Throws kDeadAgent once the agent has been killed.
  WorkingState& working_state();
  const WorkingState& working_state() const;

  // Throws kDeadAgent when killed; moving back to Preparing is not allowed.
  void Transition(AgentState next);
  // Erases the working state. Idempotent.
  void Kill();

 private:
  ProcessId process_id_;
  SessionId session_id_;
  AgentState state_ = AgentState::kPreparing;
  std::optional<WorkingState> working_;
};

struct ServiceGrant {
  Token token;
  ProcessId process_id;
  SessionId session_id;
  crypto::PublicKey agent_key;
};

// Keys of the peers the manager seals to.
struct Peers {
  crypto::PublicKey directory;
  crypto::PublicKey bank;
  crypto::PublicKey master;
};

// Sum of quantity x unit price.
std::int64_t BillTotal(std::span<const LineItem> items);

// Body of the message that opens a payment session at the bank.
Message PaymentOpenMessage(const PaymentSession& session);

class Manager : public simnet::Actor {
 public:
  Manager(crypto::KeyPair keys, ServiceCatalog catalog, TokenLedger& ledger,
          PaymentMode mode, Peers peers, Prng prng, simnet::Probe probe = {});

  // Opens a service_request, issues a token and spawns a Preparing agent.
  // Throws kWrongRecipient, kCorrupt or kUnknownService.
  ServiceGrant HandleServiceRequest(const crypto::SealedBox& box,
                                    const Address& customer = {});

  // Seals `order` to the master node and moves the agent to Serving. Throws
  // kDeadAgent for a killed or unknown agent, kTokenReplay for a token that
  // is no longer Issued, kPrecondition for an agent awaiting payment.
  crypto::SealedBox ForwardToMn(const ProcessId& agent, const TokenId& token,
                                const protocol::ServiceOrder& order,
                                const crypto::PublicKey& mn_key);

  // Throws kUnknownService.
  Bill ComputeBill(
      const SessionId& session,
      std::span<const std::pair<std::int64_t, std::int64_t>> completed) const;

  // Records the bill on the agent and opens a payment session bound to the
  // token and amount. Throws kPrecondition on a negative total.
  PaymentSession RedirectToBank(const ProcessId& agent, const Bill& bill);

  // Persists one BillingRecord. Returns the killed agent when the payment
  // closes the session (always in postpaid mode). Throws kUnknownPayment.
  std::optional<AgentProcess> OnPaymentNotification(
      const PaymentNotification& notification, std::uint64_t tick);

  // Kills the agent, expires its token if never redeemed, and forgets every
  // session-scoped value. Returns the killed agent.
  AgentProcess KillAgent(const ProcessId& agent);

  // Everything the manager keeps across sessions.
  std::vector<simnet::StoreEntry> StoreDump() const;

  const std::vector<BillingRecord>& billing_records() const {
    return records_;
  }
  const AgentProcess* FindAgent(const ProcessId& agent) const;
  std::size_t live_agents() const { return agents_.size(); }
  const crypto::PublicKey& public_key() const { return keys_.public_part; }
  PaymentMode mode() const { return mode_; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  AgentProcess& LiveAgent(const ProcessId& agent);
  AgentProcess* AgentByKey(const KeyId& key);
  void OnManagerMessage(const Message& message, const Address& from,
                        simnet::Network& network);
  void OnAgentMessage(AgentProcess& agent, const Message& message,
                      simnet::Network& network);
  void OnResultOnion(AgentProcess& agent, const crypto::OnionPacket& packet,
                     simnet::Network& network);
  void TryForward(AgentProcess& agent, simnet::Network& network);
  void IssueBill(AgentProcess& agent, simnet::Network& network);
  void TryClose(AgentProcess& agent, simnet::Network& network);
  void Close(AgentProcess& agent, simnet::Network& network);
  void SendSealed(const Address& to, const Message& message,
                  const crypto::PublicKey& key, const SessionId& session,
                  simnet::Network& network, const Address& from);
  std::string FreshId(std::string_view prefix);

  crypto::KeyPair keys_;
  ServiceCatalog catalog_;
  TokenLedger& ledger_;
  PaymentMode mode_;
  Peers peers_;
  Prng prng_;
  simnet::Probe probe_;
  std::map<ProcessId, AgentProcess> agents_;
  std::map<PaymentHandle, std::pair<ProcessId, PaymentSession>> payments_;
  std::vector<BillingRecord> records_;
};

}  // namespace anoncloud::manager

#endif  // ANONCLOUD_MANAGER_H_
