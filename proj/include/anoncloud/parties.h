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

#ifndef ANONCLOUD_PARTIES_H_
#define ANONCLOUD_PARTIES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/ids.h"
#include "anoncloud/manager.h"
#include "anoncloud/prng.h"
#include "anoncloud/probe.h"
#include "anoncloud/simnet.h"

// The two parties outside the cloud: the bank gateway and customers.
namespace anoncloud::parties {

class Bank : public simnet::Actor {
 public:
  Bank(crypto::KeyPair keys, crypto::PublicKey manager_key, Prng prng,
       simnet::Probe probe = {});

  const crypto::PublicKey& public_key() const { return keys_.public_part; }
  std::size_t open_sessions() const { return open_.size(); }
  std::size_t settled() const { return settled_; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  struct Open {
    TokenId token_id;
    std::int64_t amount = 0;
  };

  crypto::KeyPair keys_;
  crypto::PublicKey manager_key_;
  Prng prng_;
  simnet::Probe probe_;
  std::map<PaymentHandle, Open> open_;
  std::size_t settled_ = 0;
};

struct ServiceOrderRequest {
  std::int64_t service_number = 1;
  std::int64_t quantity = 1;
  std::string job;
};

struct CustomerSession {
  ServiceOrderRequest request;
  crypto::KeyPair reply_key;
  SessionId session_id;
  TokenId token_id;
  ProcessId process_id;
  std::optional<crypto::PublicKey> agent_key;
  std::optional<PaymentHandle> payment_handle;
  std::optional<std::int64_t> bill_total;
  std::optional<std::string> result;
  std::optional<PaymentReference> receipt;
  bool paid = false;
  bool acked = false;
  bool torn_down = false;
};

class Customer : public simnet::Actor {
 public:
  Customer(std::string name, std::string identity,
           crypto::PublicKey manager_key, crypto::PublicKey bank_key,
           manager::PaymentMode mode, Prng prng, simnet::Probe probe = {});

  // Sends a sealed service request to the manager.
  void Start(const ServiceOrderRequest& request, simnet::Network& network);

  Address address() const { return Address(name_); }
  const std::string& identity() const { return identity_; }
  const std::vector<CustomerSession>& sessions() const { return sessions_; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  CustomerSession* SessionFor(const KeyId& key);
  void Advance(CustomerSession& session, simnet::Network& network);
  void Send(const Address& to, const Message& message,
            const crypto::PublicKey& key, const SessionId& session,
            simnet::Network& network);

  std::string name_;
  std::string identity_;
  crypto::PublicKey manager_key_;
  crypto::PublicKey bank_key_;
  manager::PaymentMode mode_;
  Prng prng_;
  simnet::Probe probe_;
  std::vector<CustomerSession> sessions_;
};

}  // namespace anoncloud::parties

#endif  // ANONCLOUD_PARTIES_H_
