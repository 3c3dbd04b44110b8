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

#include "anoncloud/knowledge.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "anoncloud/error.h"

namespace anoncloud::simnet {

KeyRing::KeyRing(const std::vector<crypto::KeyPair>& keys) {
  for (const auto& key : keys) Add(key);
}

void KeyRing::Add(const crypto::KeyPair& key) { keys_.emplace(key.key_id, key); }

const crypto::KeyPair* KeyRing::Find(const KeyId& id) const {
  auto it = keys_.find(id);
  return it == keys_.end() ? nullptr : &it->second;
}

namespace {

constexpr int kMaxDepth = 64;

void ExpandInto(std::span<const std::uint8_t> data, const KeyRing& ring,
                Readout& out, int depth);

void ExpandSealed(const crypto::SealedBox& box, const KeyRing& ring,
                  Readout& out, int depth) {
  const crypto::KeyPair* key = ring.Find(box.recipient_key_id);
  if (key == nullptr) return;
  Bytes plain;
  try {
    plain = crypto::Open(box, *key);
  } catch (const Error&) {
    return;
  }
  ++out.opened_boxes;
  ExpandInto(plain, ring, out, depth + 1);
}

void ExpandInto(std::span<const std::uint8_t> data, const KeyRing& ring,
                Readout& out, int depth) {
  if (data.empty() || depth > kMaxDepth) return;
  try {
    switch (data[0]) {
      case kMessageTag: {
        Message message = DecodeMessage(data);
        for (const auto& [name, value] : message.fields) {
          if (name == "sealed" || name == "onion" || name == "message") {
            ExpandInto(value, ring, out, depth + 1);
          }
        }
        out.messages.push_back(std::move(message));
        return;
      }
      case crypto::kSealedTag:
        ExpandSealed(crypto::DecodeSealedBox(data), ring, out, depth);
        return;
      case crypto::kOnionTag:
        ExpandSealed(crypto::DecodeOnion(data).outer, ring, out, depth);
        return;
      case static_cast<std::uint8_t>(crypto::LayerMarker::kRelay):
      case static_cast<std::uint8_t>(crypto::LayerMarker::kTerminal):
      case static_cast<std::uint8_t>(crypto::LayerMarker::kReply): {
        crypto::Layer layer = crypto::DecodeLayer(data);
        if (layer.marker == crypto::LayerMarker::kRelay) {
          out.relay_hops.push_back(layer.next_hop);
        }
        ExpandInto(layer.inner, ring, out, depth + 1);
        return;
      }
      default:
        break;
    }
  } catch (const Error&) {
    // Fall through: readable but not in a format we parse.
  }
  out.opaque.emplace_back(data.begin(), data.end());
}

void AddMatches(const SecretDictionary& secrets, SecretKind kind,
                std::string_view value, std::vector<SecretRef>& out) {
  for (const SecretRef* ref : secrets.Lookup(kind, value)) out.push_back(*ref);
}

}  // namespace

Readout Expand(std::span<const std::uint8_t> body, const KeyRing& ring) {
  Readout out;
  ExpandInto(body, ring, out, 0);
  return out;
}

std::optional<SecretKind> FieldKind(std::string_view field) {
  static const std::map<std::string_view, SecretKind> kFields = {
      {"customer_identity", SecretKind::kCustomerIdentity},
      {"token_id", SecretKind::kTokenId},
      {"process_id", SecretKind::kProcessId},
      {"session_id", SecretKind::kSessionId},
      {"payment_handle", SecretKind::kPaymentHandle},
      {"payment_reference", SecretKind::kPaymentReference},
      {"amount", SecretKind::kAmount},
      {"total", SecretKind::kAmount},
      {"job", SecretKind::kJobPayload},
      {"sub_job", SecretKind::kSubPayload},
      {"result", SecretKind::kResult},
      {"sub_result", SecretKind::kResult},
      {"hop", SecretKind::kPseudonym},
      {"true_id", SecretKind::kTrueId},
      {"reply_key", SecretKind::kSessionKey},
      {"agent_key", SecretKind::kSessionKey},
  };
  auto it = kFields.find(field);
  if (it == kFields.end()) return std::nullopt;
  return it->second;
}

std::vector<SecretRef> Classify(const Readout& readout,
                                const SecretDictionary& secrets) {
  std::vector<SecretRef> out;
  for (const Message& message : readout.messages) {
    for (const auto& [name, value] : message.fields) {
      auto kind = FieldKind(name);
      if (!kind) continue;
      if (*kind == SecretKind::kSessionKey) {
        try {
          AddMatches(secrets, *kind, crypto::DecodePublicKey(value).id.str(), out);
        } catch (const Error&) {
        }
        continue;
      }
      AddMatches(secrets, *kind, ToString(value), out);
    }
  }
  for (const Pseudonym& hop : readout.relay_hops) {
    AddMatches(secrets, SecretKind::kPseudonym, hop.str(), out);
  }
  return out;
}

bool KnowledgeSet::Has(SecretKind kind) const { return Count(kind) > 0; }

std::size_t KnowledgeSet::Count(SecretKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      refs.begin(), refs.end(),
      [kind](const SecretRef& ref) { return ref.kind == kind; }));
}

KnowledgeSet Knowledge(const Transcript& transcript, std::string_view principal,
                       std::optional<std::size_t> prefix, bool persistent_only) {
  KnowledgeSet out;
  out.principal = std::string(principal);
  KeyRing ring;
  if (principal != kObserver) {
    ring = KeyRing(transcript.keys.KeysOf(out.principal, persistent_only));
  }
  std::size_t n = std::min(prefix.value_or(transcript.envelopes.size()),
                           transcript.envelopes.size());
  for (std::size_t i = 0; i < n; ++i) {
    Readout readout = Expand(transcript.envelopes[i].body, ring);
    for (SecretRef& ref : Classify(readout, transcript.secrets)) {
      out.refs.insert(std::move(ref));
    }
  }
  return out;
}

std::string_view ModelName(AdversaryModel model) {
  switch (model) {
    case AdversaryModel::kGlobalObserver: return "global-observer";
    case AdversaryModel::kManagerPostSession: return "manager-post-session";
    case AdversaryModel::kManagerMnCollusion: return "manager-mn-collusion";
  }
  return "?";
}

AdversaryModel ParseModel(std::string_view name) {
  for (AdversaryModel model : AllModels()) {
    if (ModelName(model) == name) return model;
  }
  throw Error(ErrorCode::kConfig, "unknown adversary model " + std::string(name));
}

std::vector<AdversaryModel> AllModels() {
  return {AdversaryModel::kGlobalObserver, AdversaryModel::kManagerPostSession,
          AdversaryModel::kManagerMnCollusion};
}

Adversary AdversaryFor(AdversaryModel model) {
  Adversary adversary;
  adversary.name = std::string(ModelName(model));
  switch (model) {
    case AdversaryModel::kGlobalObserver:
      adversary.members = {{std::string(kObserver), false}};
      break;
    case AdversaryModel::kManagerPostSession:
      // Compromised after teardown: agent keys are gone, the store remains.
      adversary.members = {{"manager", true}};
      adversary.reads_manager_store = true;
      break;
    case AdversaryModel::kManagerMnCollusion:
      adversary.members = {{"manager", false}, {"master", false}};
      adversary.reads_manager_store = true;
      break;
  }
  return adversary;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

LinkageVerdict LinkageReport(const Transcript& transcript,
                             const Adversary& adversary,
                             std::span<const StoreEntry> store) {
  KeyRing ring;
  for (const AdversaryMember& member : adversary.members) {
    if (member.principal == kObserver) continue;
    for (const auto& key :
         transcript.keys.KeysOf(member.principal, member.persistent_keys_only)) {
      ring.Add(key);
    }
  }

  std::vector<std::vector<SecretRef>> pools;
  for (const Envelope& envelope : transcript.envelopes) {
    auto refs = Classify(Expand(envelope.body, ring), transcript.secrets);
    if (!refs.empty()) pools.push_back(std::move(refs));
  }
  if (adversary.reads_manager_store) {
    std::map<std::size_t, std::vector<SecretRef>> by_record;
    for (const StoreEntry& entry : store) {
      auto kind = FieldKind(entry.field);
      if (!kind) continue;
      for (const SecretRef* ref : transcript.secrets.Lookup(*kind, entry.value)) {
        by_record[entry.record].push_back(*ref);
      }
    }
    for (auto& [record, refs] : by_record) pools.push_back(std::move(refs));
  }

  DisjointSets sets(pools.size());
  std::map<std::pair<SecretKind, std::string>, std::size_t> first_seen;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    for (const SecretRef& ref : pools[i]) {
      if (!IsIdentifier(ref.kind)) continue;
      auto [it, inserted] = first_seen.emplace(std::make_pair(ref.kind, ref.value), i);
      if (!inserted) sets.Union(i, it->second);
    }
  }

  struct Component {
    std::set<SessionId> linkers;
    std::set<SessionId> content;
    std::set<SessionId> nodes;
    std::set<SessionId> payment_refs;
    std::set<SessionId> payment_meta;
  };
  std::map<std::size_t, Component> components;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    Component& c = components[sets.Find(i)];
    for (const SecretRef& ref : pools[i]) {
      if (ref.session.empty()) continue;
      switch (ref.kind) {
        case SecretKind::kCustomerIdentity:
          c.linkers.insert(ref.session);
          break;
        case SecretKind::kPaymentReference:
          c.linkers.insert(ref.session);
          c.payment_refs.insert(ref.session);
          break;
        case SecretKind::kTokenId:
        case SecretKind::kAmount:
          c.payment_meta.insert(ref.session);
          break;
        case SecretKind::kPseudonym:
        case SecretKind::kTrueId:
          c.nodes.insert(ref.session);
          break;
        default:
          if (IsContent(ref.kind)) c.content.insert(ref.session);
          break;
      }
    }
  }

  LinkageVerdict verdict;
  verdict.adversary = adversary.name;
  for (const SecretRef& ref : transcript.secrets.all()) {
    if (ref.kind != SecretKind::kCustomerIdentity) continue;
    CustomerLinkage link;
    link.customer = ref.owner;
    link.session = ref.session;
    for (const auto& [root, c] : components) {
      if (!c.linkers.contains(ref.session)) continue;
      link.content_linked |= c.content.contains(ref.session);
      link.sn_linked |= c.nodes.contains(ref.session);
      link.payment_linked |= c.payment_refs.contains(ref.session) &&
                             c.payment_meta.contains(ref.session);
    }
    verdict.customers.push_back(std::move(link));
  }
  return verdict;
}

bool MeetsExpectation(AdversaryModel model, const LinkageVerdict& verdict) {
  for (const CustomerLinkage& c : verdict.customers) {
    switch (model) {
      case AdversaryModel::kGlobalObserver:
        if (c.content_linked || c.sn_linked || c.payment_linked) return false;
        break;
      case AdversaryModel::kManagerPostSession:
        if (c.content_linked || c.sn_linked || !c.payment_linked) return false;
        break;
      case AdversaryModel::kManagerMnCollusion:
        if (!c.content_linked) return false;
        break;
    }
  }
  return true;
}

}  // namespace anoncloud::simnet
