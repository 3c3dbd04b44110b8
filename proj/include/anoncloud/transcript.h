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

#ifndef ANONCLOUD_TRANSCRIPT_H_
#define ANONCLOUD_TRANSCRIPT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anoncloud/crypto.h"
#include "anoncloud/ids.h"
#include "anoncloud/simnet.h"

namespace anoncloud::simnet {

enum class SecretKind {
  kCustomerIdentity,
  kTokenId,
  kProcessId,
  kSessionId,
  kPaymentHandle,
  kPaymentReference,
  kAmount,
  kJobPayload,
  kSubPayload,
  kResult,
  kPseudonym,
  kTrueId,
  kSessionKey,
};

std::string_view SecretKindName(SecretKind kind);
SecretKind ParseSecretKind(std::string_view name);

// Identifiers chain knowledge across messages; the rest only attach to the
// message they were read from.
bool IsIdentifier(SecretKind kind);
bool IsContent(SecretKind kind);

struct SecretRef {
  SecretKind kind = SecretKind::kTokenId;
  std::string value;
  SessionId session;  // empty for secrets not bound to one session
  std::string owner;  // principal meant to read it, where that matters

  friend auto operator<=>(const SecretRef&, const SecretRef&) = default;
};

// Everything the simulation knows to be secret, indexed for typed lookup.
class SecretDictionary {
 public:
  void Add(SecretRef ref);
  std::vector<const SecretRef*> Lookup(SecretKind kind,
                                       std::string_view value) const;
  const std::vector<SecretRef>& all() const { return refs_; }
  std::size_t size() const { return refs_.size(); }

 private:
  std::vector<SecretRef> refs_;
  std::multimap<std::pair<SecretKind, std::string>, std::size_t, std::less<>>
      index_;
};

struct KeyRecord {
  std::string principal;
  std::uint64_t seed = 0;
  // Long-lived keys survive session teardown; session keys (agent and
  // customer per-session keys) are destroyed with the session.
  bool persistent = true;
  SessionId session;
};

class KeyInventory {
 public:
  // Registers the key derived from `seed` and returns it.
  crypto::KeyPair Add(const std::string& principal, std::uint64_t seed,
                      bool persistent, SessionId session = {});
  // Adds `principal` with no keys (the passive observer).
  void AddPrincipal(const std::string& principal);

  bool Knows(const std::string& principal) const {
    return principals_.contains(principal);
  }
  std::vector<crypto::KeyPair> KeysOf(const std::string& principal,
                                      bool persistent_only = false) const;
  const std::vector<KeyRecord>& records() const { return records_; }
  std::vector<std::string> principals() const;

 private:
  std::vector<KeyRecord> records_;
  std::vector<crypto::KeyPair> pairs_;
  std::map<std::string, std::vector<std::size_t>> principals_;
};

struct Transcript {
  std::vector<Envelope> envelopes;
  KeyInventory keys;
  SecretDictionary secrets;
};

inline constexpr std::string_view kObserver = "observer";

}  // namespace anoncloud::simnet

#endif  // ANONCLOUD_TRANSCRIPT_H_
