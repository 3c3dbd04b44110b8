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

#include "anoncloud/parties.h"

#include "anoncloud/error.h"
#include "anoncloud/message.h"
#include "anoncloud/protocol.h"

namespace anoncloud::parties {

using simnet::SecretKind;

namespace {

void SendSealed(const Address& from, const Address& to, const Message& message,
                const crypto::PublicKey& key, const SessionId& session,
                simnet::Network& network) {
  simnet::Envelope out;
  out.from = from;
  out.to = to;
  out.kind = simnet::BodyKind::kSealed;
  out.body = crypto::Encode(crypto::Seal(EncodeMessage(message), key));
  out.session = session;
  network.Send(std::move(out));
}

}  // namespace

Bank::Bank(crypto::KeyPair keys, crypto::PublicKey manager_key, Prng prng,
           simnet::Probe probe)
    : keys_(std::move(keys)),
      manager_key_(std::move(manager_key)),
      prng_(std::move(prng)),
      probe_(std::move(probe)) {}

void Bank::OnEnvelope(const simnet::Envelope& envelope,
                      simnet::Network& network) {
  try {
    Message message =
        DecodeMessage(crypto::Open(crypto::DecodeSealedBox(envelope.body), keys_));
    if (message.kind == "payment_open") {
      if (envelope.from != protocol::ManagerAddress()) {
        throw Error(ErrorCode::kAccessDenied, "payment sessions come from the manager");
      }
      open_[PaymentHandle(message.Get("payment_handle"))] = {
          TokenId(message.Get("token_id")), message.GetInt("amount")};
      return;
    }
    if (message.kind != "payment") {
      throw Error(ErrorCode::kCorrupt, "unexpected " + message.kind);
    }
    const PaymentHandle handle(message.Get("payment_handle"));
    auto it = open_.find(handle);
    if (it == open_.end()) {
      throw Error(ErrorCode::kUnknownPayment, "payment handle " + handle.str());
    }
    if (message.GetInt("amount") != it->second.amount) {
      throw Error(ErrorCode::kPrecondition, "payment amount does not match bill");
    }
    if (message.Get("customer_identity").empty()) {
      throw Error(ErrorCode::kAccessDenied, "anonymous payment");
    }
    const Open open = it->second;
    open_.erase(it);
    ++settled_;

    PaymentReference reference("r-" + prng_.Hex(8));
    probe_.Secret(SecretKind::kPaymentReference, reference.str(),
                  envelope.session);

    Message receipt("receipt");
    receipt.Set("payment_reference", reference.str());
    SendSealed(protocol::BankAddress(), envelope.from, receipt,
               protocol::GetKey(message, "reply_key"), envelope.session,
               network);

    Message notification("payment_notification");
    notification.Set("payment_handle", handle.str());
    notification.Set("payment_reference", reference.str());
    notification.Set("token_id", open.token_id.str());
    notification.SetInt("amount", open.amount);
    SendSealed(protocol::BankAddress(), protocol::ManagerAddress(),
               notification, manager_key_, envelope.session, network);
  } catch (const Error& e) {
    probe_.Event("bank-error", envelope.session, e.what());
  }
}

Customer::Customer(std::string name, std::string identity,
                   crypto::PublicKey manager_key, crypto::PublicKey bank_key,
                   manager::PaymentMode mode, Prng prng, simnet::Probe probe)
    : name_(std::move(name)),
      identity_(std::move(identity)),
      manager_key_(std::move(manager_key)),
      bank_key_(std::move(bank_key)),
      mode_(mode),
      prng_(std::move(prng)),
      probe_(std::move(probe)) {}

void Customer::Send(const Address& to, const Message& message,
                    const crypto::PublicKey& key, const SessionId& session,
                    simnet::Network& network) {
  SendSealed(address(), to, message, key, session, network);
}

void Customer::Start(const ServiceOrderRequest& request,
                     simnet::Network& network) {
  CustomerSession session;
  session.request = request;
  session.reply_key = probe_.SessionKey(name_, {}, prng_);
  Message message("service_request");
  message.SetInt("service_number", request.service_number);
  message.SetInt("quantity", request.quantity);
  protocol::PutKey(message, "reply_key", session.reply_key.public_part);
  sessions_.push_back(std::move(session));
  Send(protocol::ManagerAddress(), message, manager_key_, {}, network);
}

CustomerSession* Customer::SessionFor(const KeyId& key) {
  for (CustomerSession& session : sessions_) {
    if (session.reply_key.key_id == key) return &session;
  }
  return nullptr;
}

void Customer::OnEnvelope(const simnet::Envelope& envelope,
                          simnet::Network& network) {
  try {
    crypto::SealedBox box = crypto::DecodeSealedBox(envelope.body);
    CustomerSession* session = SessionFor(box.recipient_key_id);
    if (session == nullptr) {
      throw Error(ErrorCode::kWrongRecipient, "no session holds this key");
    }
    Message message = DecodeMessage(crypto::Open(box, session->reply_key));
    if (message.kind == "token_grant") {
      session->session_id = SessionId(message.Get("session_id"));
      session->token_id = TokenId(message.Get("token_id"));
      session->process_id = ProcessId(message.Get("process_id"));
      session->agent_key = protocol::GetKey(message, "agent_key");
      const SessionId& id = session->session_id;
      probe_.Secret(SecretKind::kCustomerIdentity, identity_, id, name_);
      probe_.Secret(SecretKind::kJobPayload, session->request.job, id, name_);
      probe_.Secret(SecretKind::kSessionKey, session->reply_key.key_id.str(), id,
                    name_);
      probe_.Event("customer-session", id, name_);

      Message job("job_submit");
      job.Set("process_id", session->process_id.str());
      job.Set("job", session->request.job);
      Send(protocol::ManagerAddress(), job, *session->agent_key, id, network);
    } else if (message.kind == "bill") {
      session->payment_handle = PaymentHandle(message.Get("payment_handle"));
      session->bill_total = message.GetInt("total");
    } else if (message.kind == "result") {
      session->result = message.Get("result");
      probe_.Event("customer-result", session->session_id, *session->result);
    } else if (message.kind == "receipt") {
      session->receipt = PaymentReference(message.Get("payment_reference"));
    } else if (message.kind == "teardown") {
      session->torn_down = true;
      probe_.Event("customer-teardown", session->session_id);
      return;
    } else {
      throw Error(ErrorCode::kCorrupt, "unexpected " + message.kind);
    }
    Advance(*session, network);
  } catch (const Error& e) {
    probe_.Event("customer-error", envelope.session, e.what());
  }
}

void Customer::Advance(CustomerSession& session, simnet::Network& network) {
  const bool prepaid = mode_ == manager::PaymentMode::kPrepaid;
  if (!session.acked && session.result && (prepaid || session.bill_total)) {
    Message ack("ack");
    ack.Set("process_id", session.process_id.str());
    Send(protocol::ManagerAddress(), ack, *session.agent_key,
         session.session_id, network);
    session.acked = true;
  }
  if (!session.paid && session.bill_total && (prepaid || session.result)) {
    Message payment("payment");
    payment.Set("payment_handle", session.payment_handle->str());
    payment.Set("customer_identity", identity_);
    payment.SetInt("amount", *session.bill_total);
    protocol::PutKey(payment, "reply_key", session.reply_key.public_part);
    Send(protocol::BankAddress(), payment, bank_key_, session.session_id,
         network);
    session.paid = true;
  }
}

}  // namespace anoncloud::parties
