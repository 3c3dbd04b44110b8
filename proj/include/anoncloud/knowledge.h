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

#ifndef ANONCLOUD_KNOWLEDGE_H_
#define ANONCLOUD_KNOWLEDGE_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/message.h"
#include "anoncloud/transcript.h"

namespace anoncloud::simnet {

class KeyRing {
 public:
  KeyRing() = default;
  explicit KeyRing(const std::vector<crypto::KeyPair>& keys);
  void Add(const crypto::KeyPair& key);
  const crypto::KeyPair* Find(const KeyId& id) const;
  bool empty() const { return keys_.empty(); }

 private:
  std::unordered_map<KeyId, crypto::KeyPair> keys_;
};

// Everything a key ring can read out of one envelope body: decoded messages,
// next-hop names from relay layers, and bytes it opened but could not parse.
struct Readout {
  std::vector<Message> messages;
  std::vector<Pseudonym> relay_hops;
  std::vector<Bytes> opaque;
  std::size_t opened_boxes = 0;
};

// Recursively opens every sealed layer the ring has a key for.
Readout Expand(std::span<const std::uint8_t> body, const KeyRing& ring);

// Secret kind carried by a message field of this name, if any.
std::optional<SecretKind> FieldKind(std::string_view field);

// Typed lookup of every field and relay hop in `readout`.
std::vector<SecretRef> Classify(const Readout& readout,
                                const SecretDictionary& secrets);

struct KnowledgeSet {
  std::string principal;
  std::set<SecretRef> refs;

  bool Has(SecretKind kind) const;
  std::size_t Count(SecretKind kind) const;
};

// Secrets `principal` can read from the first `prefix` envelopes (all of them
// by default) using every key the inventory lists for it. The principal
// "observer" holds no keys. Throws kUnknownPrincipal.
KnowledgeSet Knowledge(const Transcript& transcript, std::string_view principal,
                       std::optional<std::size_t> prefix = std::nullopt,
                       bool persistent_only = false);

// One persisted value in the manager's store; `record` groups the fields of a
// single stored record.
struct StoreEntry {
  std::size_t record = 0;
  std::string field;
  std::string value;

  friend bool operator==(const StoreEntry&, const StoreEntry&) = default;
};

enum class AdversaryModel {
  kGlobalObserver,
  kManagerPostSession,
  kManagerMnCollusion,
};

std::string_view ModelName(AdversaryModel model);
AdversaryModel ParseModel(std::string_view name);
std::vector<AdversaryModel> AllModels();

struct AdversaryMember {
  std::string principal;
  bool persistent_keys_only = false;
};

struct Adversary {
  std::string name;
  std::vector<AdversaryMember> members;
  bool reads_manager_store = false;
};

Adversary AdversaryFor(AdversaryModel model);

struct CustomerLinkage {
  std::string customer;
  SessionId session;
  bool content_linked = false;  // customer <-> job, sub-job or result
  bool sn_linked = false;       // customer <-> serving slave nodes
  bool payment_linked = false;  // payment reference <-> token id or amount

  friend bool operator==(const CustomerLinkage&, const CustomerLinkage&) = default;
};

struct LinkageVerdict {
  std::string adversary;
  std::vector<CustomerLinkage> customers;

  friend bool operator==(const LinkageVerdict&, const LinkageVerdict&) = default;
};

// Pools the adversary's readable secrets per envelope (and per stored record
// when it reads the store), joins pools that share an identifier, and reports
// per customer session which kinds of secret end up joined to a customer
// linker (identity or payment reference).
LinkageVerdict LinkageReport(const Transcript& transcript,
                             const Adversary& adversary,
                             std::span<const StoreEntry> store = {});

// Expected outcome per built-in model: the observer links nothing; the
// post-session manager links payment metadata only; the manager colluding
// with the master node links customers to content.
bool MeetsExpectation(AdversaryModel model, const LinkageVerdict& verdict);

}  // namespace anoncloud::simnet

#endif  // ANONCLOUD_KNOWLEDGE_H_
