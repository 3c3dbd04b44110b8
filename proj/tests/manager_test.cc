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

#include <gtest/gtest.h>

#include <set>

#include "anoncloud/error.h"

namespace anoncloud::manager {
namespace {

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kPrecondition;
}

ServiceCatalog Catalog() {
  ServiceCatalog catalog;
  catalog.Add(1, {"summation", 5});
  catalog.Add(2, {"search", 7});
  catalog.Add(3, {"free", 0});
  return catalog;
}

class ManagerTest : public ::testing::Test {
 protected:
  explicit ManagerTest(PaymentMode mode = PaymentMode::kPostpaid)
      : manager(manager_keys, Catalog(), ledger, mode,
                {crypto::GenerateKeyPair(2).public_part, crypto::GenerateKeyPair(3).public_part,
                 mn_keys.public_part},
                Prng(7)) {}

  crypto::SealedBox Request(std::int64_t service, std::int64_t quantity = 1) {
    Message m("service_request");
    m.SetInt("service_number", service);
    m.SetInt("quantity", quantity);
    m.Set("customer_identity", "cid:alice:000000");
    protocol::PutKey(m, "reply_key", reply_keys.public_part);
    return crypto::Seal(EncodeMessage(m), manager_keys.public_part);
  }

  protocol::ServiceOrder OrderFor(const ServiceGrant& grant) {
    protocol::ServiceOrder order;
    order.token_id = grant.token.token_id;
    order.session_id = grant.session_id;
    order.service_number = grant.token.service_number;
    order.job = "sum[1,2,3]";
    order.circuit.hops = {{Pseudonym("n-a"), crypto::GenerateKeyPair(6).public_part},
                          {Pseudonym("n-b"), crypto::GenerateKeyPair(8).public_part},
                          {Pseudonym("n-m"), mn_keys.public_part}};
    order.agent_hop = Pseudonym("agent");
    order.agent_key = grant.agent_key;
    order.reply_key = reply_keys.public_part;
    return order;
  }

  // Runs a grant through forwarding, billing and payment.
  void CompleteSession(std::int64_t service, std::int64_t quantity, const std::string& ref) {
    ServiceGrant grant = manager.HandleServiceRequest(Request(service, quantity));
    manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                        mn_keys.public_part);
    ledger.Redeem(grant.token.token_id);
    std::pair<std::int64_t, std::int64_t> done[] = {{service, quantity}};
    Bill bill = manager.ComputeBill(grant.session_id, done);
    PaymentSession ps = manager.RedirectToBank(grant.process_id, bill);
    manager.OnPaymentNotification({ps.handle, PaymentReference(ref), ps.token_id, ps.amount},
                                  manager.billing_records().size());
  }

  crypto::KeyPair manager_keys = crypto::GenerateKeyPair(1);
  crypto::KeyPair mn_keys = crypto::GenerateKeyPair(4);
  crypto::KeyPair reply_keys = crypto::GenerateKeyPair(5);
  TokenLedger ledger;
  Manager manager;
};

TEST(CatalogTest, DuplicateAndNegativeRejected) {
  ServiceCatalog catalog = Catalog();
  EXPECT_EQ(CodeOf([&] { catalog.Add(1, {"again", 1}); }), ErrorCode::kPrecondition);
  EXPECT_EQ(CodeOf([&] { catalog.Add(9, {"neg", -1}); }), ErrorCode::kPrecondition);
  EXPECT_EQ(CodeOf([&] { catalog.Get(42); }), ErrorCode::kUnknownService);
  EXPECT_EQ(catalog.Get(2).unit_price, 7);
}

TEST(LedgerTest, IssueRedeemExpire) {
  TokenLedger ledger;
  ledger.Issue(TokenId("a"), 1);
  EXPECT_EQ(CodeOf([&] { ledger.Issue(TokenId("a"), 1); }), ErrorCode::kPrecondition);
  EXPECT_EQ(ledger.Redeem(TokenId("a")).state, TokenState::kRedeemed);
  EXPECT_EQ(CodeOf([&] { ledger.Redeem(TokenId("a")); }), ErrorCode::kTokenReplay);
  EXPECT_EQ(CodeOf([&] { ledger.Redeem(TokenId("zz")); }), ErrorCode::kAccessDenied);
  ledger.Expire(TokenId("a"));
  EXPECT_EQ(ledger.Find(TokenId("a"))->state, TokenState::kRedeemed);
  ledger.Issue(TokenId("b"), 1);
  ledger.Expire(TokenId("b"));
  EXPECT_EQ(ledger.Find(TokenId("b"))->state, TokenState::kExpired);
  EXPECT_EQ(CodeOf([&] { ledger.Redeem(TokenId("b")); }), ErrorCode::kTokenReplay);
}

TEST(PaymentModeTest, NamesRoundTrip) {
  for (auto mode : {PaymentMode::kPrepaid, PaymentMode::kPostpaid}) {
    EXPECT_EQ(ParsePaymentMode(PaymentModeName(mode)), mode);
  }
  EXPECT_EQ(CodeOf([] { ParsePaymentMode("barter"); }), ErrorCode::kConfig);
}

TEST(AgentTest, KilledAgentHasNoWorkingState) {
  AgentProcess agent(ProcessId("p"), SessionId("s"), {});
  agent.Transition(AgentState::kServing);
  EXPECT_EQ(CodeOf([&] { agent.Transition(AgentState::kPreparing); }), ErrorCode::kPrecondition);
  agent.Kill();
  EXPECT_EQ(agent.state(), AgentState::kKilled);
  EXPECT_EQ(CodeOf([&] { agent.working_state(); }), ErrorCode::kDeadAgent);
  EXPECT_EQ(CodeOf([&] { agent.Transition(AgentState::kServing); }), ErrorCode::kDeadAgent);
  agent.Kill();
}

TEST_F(ManagerTest, RequestIssuesTokenAndSpawnsAgent) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  EXPECT_EQ(grant.token.state, TokenState::kIssued);
  EXPECT_EQ(grant.token.service_number, 1);
  const AgentProcess* agent = manager.FindAgent(grant.process_id);
  ASSERT_NE(agent, nullptr);
  EXPECT_EQ(agent->state(), AgentState::kPreparing);
  EXPECT_EQ(agent->working_state().agent_key.public_part, grant.agent_key);
  EXPECT_EQ(ledger.Find(grant.token.token_id)->state, TokenState::kIssued);
}

TEST_F(ManagerTest, DistinctSessionsGetDistinctIds) {
  std::set<std::string> ids;
  for (int i = 0; i < 20; ++i) {
    ServiceGrant g = manager.HandleServiceRequest(Request(1));
    ids.insert(g.token.token_id.str());
    ids.insert(g.process_id.str());
    ids.insert(g.session_id.str());
  }
  EXPECT_EQ(ids.size(), 60u);
  EXPECT_EQ(manager.live_agents(), 20u);
}

TEST_F(ManagerTest, UnknownServiceRejected) {
  EXPECT_EQ(CodeOf([&] { manager.HandleServiceRequest(Request(99)); }),
            ErrorCode::kUnknownService);
  EXPECT_EQ(manager.live_agents(), 0u);
  EXPECT_TRUE(ledger.tokens().empty());
}

TEST_F(ManagerTest, RequestSealedToAnotherKeyRejected) {
  Message m("service_request");
  m.SetInt("service_number", 1);
  auto box = crypto::Seal(EncodeMessage(m), mn_keys.public_part);
  EXPECT_EQ(CodeOf([&] { manager.HandleServiceRequest(box); }), ErrorCode::kWrongRecipient);
}

TEST_F(ManagerTest, ForwardMovesAgentToServing) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  auto box = manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                                 mn_keys.public_part);
  EXPECT_EQ(manager.FindAgent(grant.process_id)->state(), AgentState::kServing);
  auto order = protocol::OrderFromMessage(DecodeMessage(crypto::Open(box, mn_keys)));
  EXPECT_EQ(order.token_id, grant.token.token_id);
}

TEST_F(ManagerTest, ForwardedOrderCarriesNoCustomerIdentity) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  auto box = manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                                 mn_keys.public_part);
  Bytes plain = crypto::Open(box, mn_keys);
  std::string text(plain.begin(), plain.end());
  EXPECT_EQ(text.find("cid:alice"), std::string::npos);
  EXPECT_EQ(text.find(grant.process_id.str()), std::string::npos);
  for (const auto& [name, value] : DecodeMessage(plain).fields) {
    EXPECT_NE(name, "customer_identity");
  }
}

TEST_F(ManagerTest, ForwardForKilledAgentFails) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  manager.KillAgent(grant.process_id);
  EXPECT_EQ(CodeOf([&] {
              manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                                  mn_keys.public_part);
            }),
            ErrorCode::kDeadAgent);
  EXPECT_EQ(ledger.Find(grant.token.token_id)->state, TokenState::kExpired);
}

TEST_F(ManagerTest, ForwardWithRedeemedTokenIsReplay) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  ledger.Redeem(grant.token.token_id);
  EXPECT_EQ(CodeOf([&] {
              manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                                  mn_keys.public_part);
            }),
            ErrorCode::kTokenReplay);
}

TEST_F(ManagerTest, EmptyBillIsZero) {
  Bill bill = manager.ComputeBill(SessionId("s"), {});
  EXPECT_TRUE(bill.items.empty());
  EXPECT_EQ(bill.total, 0);
}

TEST_F(ManagerTest, TwoServicesAddUp) {
  std::pair<std::int64_t, std::int64_t> done[] = {{1, 1}, {2, 1}};
  EXPECT_EQ(manager.ComputeBill(SessionId("s"), done).total, 12);
}

TEST_F(ManagerTest, UnknownServiceInBill) {
  std::pair<std::int64_t, std::int64_t> done[] = {{77, 1}};
  EXPECT_EQ(CodeOf([&] { manager.ComputeBill(SessionId("s"), done); }),
            ErrorCode::kUnknownService);
}

TEST_F(ManagerTest, RandomBillsMatchPriceTimesQuantity) {
  const std::map<std::int64_t, std::int64_t> prices = {{1, 5}, {2, 7}, {3, 0}};
  Prng prng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<std::int64_t, std::int64_t>> done;
    std::int64_t expected = 0;
    const auto n = prng.Range(0, 6);
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t service = prng.Range(1, 3), quantity = prng.Range(0, 50);
      done.emplace_back(service, quantity);
      expected += prices.at(service) * quantity;
    }
    EXPECT_EQ(manager.ComputeBill(SessionId("s"), done).total, expected);
  }
}

TEST(BillTotalTest, OverflowRejected) {
  LineItem items[] = {{1, INT64_MAX, 2}};
  EXPECT_EQ(CodeOf([&] { BillTotal(items); }), ErrorCode::kPrecondition);
}

TEST_F(ManagerTest, RedirectOpensPaymentWithAmountOnly) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  std::pair<std::int64_t, std::int64_t> done[] = {{1, 1}, {2, 1}};
  Bill bill = manager.ComputeBill(grant.session_id, done);
  PaymentSession ps = manager.RedirectToBank(grant.process_id, bill);
  EXPECT_EQ(ps.amount, 12);
  EXPECT_EQ(ps.token_id, grant.token.token_id);
  Message open = PaymentOpenMessage(ps);
  std::set<std::string> names;
  for (const auto& [name, value] : open.fields) names.insert(name);
  EXPECT_EQ(names, (std::set<std::string>{"payment_handle", "token_id", "amount"}));
  std::string text;
  for (const auto& [name, value] : open.fields) text.append(value.begin(), value.end());
  EXPECT_EQ(text.find("cid:"), std::string::npos);
  EXPECT_EQ(text.find("sum["), std::string::npos);
}

TEST_F(ManagerTest, ZeroAmountStillOpensPayment) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(3));
  std::pair<std::int64_t, std::int64_t> done[] = {{3, 4}};
  PaymentSession ps =
      manager.RedirectToBank(grant.process_id, manager.ComputeBill(grant.session_id, done));
  EXPECT_EQ(ps.amount, 0);
}

TEST_F(ManagerTest, NegativeBillRejected) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  Bill bill{grant.session_id, {}, -1};
  EXPECT_EQ(CodeOf([&] { manager.RedirectToBank(grant.process_id, bill); }),
            ErrorCode::kPrecondition);
}

TEST_F(ManagerTest, PaymentKillsAgentAndRecordsBilling) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1, 2));
  manager.ForwardToMn(grant.process_id, grant.token.token_id, OrderFor(grant),
                      mn_keys.public_part);
  std::pair<std::int64_t, std::int64_t> done[] = {{1, 2}};
  PaymentSession ps =
      manager.RedirectToBank(grant.process_id, manager.ComputeBill(grant.session_id, done));
  auto killed = manager.OnPaymentNotification(
      {ps.handle, PaymentReference("ref-1"), ps.token_id, ps.amount}, 42);
  ASSERT_TRUE(killed.has_value());
  EXPECT_EQ(killed->state(), AgentState::kKilled);
  EXPECT_EQ(CodeOf([&] { killed->working_state(); }), ErrorCode::kDeadAgent);
  EXPECT_EQ(manager.FindAgent(grant.process_id), nullptr);
  ASSERT_EQ(manager.billing_records().size(), 1u);
  EXPECT_EQ(manager.billing_records()[0],
            (BillingRecord{grant.token.token_id, 10, PaymentReference("ref-1"), 42}));
}

TEST_F(ManagerTest, UnknownOrMismatchedPaymentRejected) {
  EXPECT_EQ(CodeOf([&] {
              manager.OnPaymentNotification({PaymentHandle("h-x"), PaymentReference("r"),
                                             TokenId("t"), 1}, 0);
            }),
            ErrorCode::kUnknownPayment);
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  std::pair<std::int64_t, std::int64_t> done[] = {{1, 1}};
  PaymentSession ps =
      manager.RedirectToBank(grant.process_id, manager.ComputeBill(grant.session_id, done));
  EXPECT_EQ(CodeOf([&] {
              manager.OnPaymentNotification({ps.handle, PaymentReference("r"), ps.token_id,
                                             ps.amount + 1}, 0);
            }),
            ErrorCode::kUnknownPayment);
  EXPECT_TRUE(manager.billing_records().empty());
}

TEST_F(ManagerTest, StoreHoldsOnlyBillingFields) {
  for (int i = 0; i < 10; ++i) CompleteSession(1 + i % 3, 1 + i, "ref-" + std::to_string(i));
  EXPECT_EQ(manager.live_agents(), 0u);
  auto dump = manager.StoreDump();
  EXPECT_EQ(dump.size(), 40u);
  std::set<std::string> fields;
  for (const auto& entry : dump) {
    fields.insert(entry.field);
    EXPECT_EQ(entry.value.find("cid:"), std::string::npos);
    EXPECT_EQ(entry.value.find("sum["), std::string::npos);
  }
  EXPECT_EQ(fields,
            (std::set<std::string>{"token_id", "amount", "payment_reference", "timestamp"}));
}

class PrepaidManagerTest : public ManagerTest {
 protected:
  PrepaidManagerTest() : ManagerTest(PaymentMode::kPrepaid) {}
};

TEST_F(PrepaidManagerTest, PaymentLeavesAgentAlive) {
  ServiceGrant grant = manager.HandleServiceRequest(Request(1));
  std::pair<std::int64_t, std::int64_t> done[] = {{1, 1}};
  PaymentSession ps =
      manager.RedirectToBank(grant.process_id, manager.ComputeBill(grant.session_id, done));
  auto killed = manager.OnPaymentNotification(
      {ps.handle, PaymentReference("r"), ps.token_id, ps.amount}, 1);
  EXPECT_FALSE(killed.has_value());
  ASSERT_NE(manager.FindAgent(grant.process_id), nullptr);
  EXPECT_TRUE(manager.FindAgent(grant.process_id)->working_state().paid);
  EXPECT_EQ(manager.billing_records().size(), 1u);
}

}  // namespace
}  // namespace anoncloud::manager
