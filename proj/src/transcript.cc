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

#include "anoncloud/transcript.h"

#include <array>

#include "anoncloud/error.h"

namespace anoncloud::simnet {

namespace {

constexpr std::array<std::pair<SecretKind, std::string_view>, 13> kKindNames = {{
    {SecretKind::kCustomerIdentity, "customer_identity"},
    {SecretKind::kTokenId, "token_id"},
    {SecretKind::kProcessId, "process_id"},
    {SecretKind::kSessionId, "session_id"},
    {SecretKind::kPaymentHandle, "payment_handle"},
    {SecretKind::kPaymentReference, "payment_reference"},
    {SecretKind::kAmount, "amount"},
    {SecretKind::kJobPayload, "job"},
    {SecretKind::kSubPayload, "sub_job"},
    {SecretKind::kResult, "result"},
    {SecretKind::kPseudonym, "pseudonym"},
    {SecretKind::kTrueId, "true_id"},
    {SecretKind::kSessionKey, "session_key"},
}};

}  // namespace

std::string_view SecretKindName(SecretKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

SecretKind ParseSecretKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kSchema, "unknown secret kind " + std::string(name));
}

bool IsIdentifier(SecretKind kind) {
  switch (kind) {
    case SecretKind::kCustomerIdentity:
    case SecretKind::kTokenId:
    case SecretKind::kProcessId:
    case SecretKind::kSessionId:
    case SecretKind::kPaymentHandle:
    case SecretKind::kPaymentReference:
    case SecretKind::kSessionKey:
      return true;
    default:
      return false;
  }
}

bool IsContent(SecretKind kind) {
  return kind == SecretKind::kJobPayload || kind == SecretKind::kSubPayload ||
         kind == SecretKind::kResult;
}

void SecretDictionary::Add(SecretRef ref) {
  index_.emplace(std::make_pair(ref.kind, ref.value), refs_.size());
  refs_.push_back(std::move(ref));
}

std::vector<const SecretRef*> SecretDictionary::Lookup(
    SecretKind kind, std::string_view value) const {
  std::vector<const SecretRef*> out;
  auto [lo, hi] = index_.equal_range(std::make_pair(kind, std::string(value)));
  for (auto it = lo; it != hi; ++it) out.push_back(&refs_[it->second]);
  return out;
}

crypto::KeyPair KeyInventory::Add(const std::string& principal,
                                  std::uint64_t seed, bool persistent,
                                  SessionId session) {
  records_.push_back({principal, seed, persistent, std::move(session)});
  pairs_.push_back(crypto::GenerateKeyPair(seed));
  principals_[principal].push_back(records_.size() - 1);
  return pairs_.back();
}

void KeyInventory::AddPrincipal(const std::string& principal) {
  principals_.try_emplace(principal);
}

std::vector<crypto::KeyPair> KeyInventory::KeysOf(const std::string& principal,
                                                  bool persistent_only) const {
  auto it = principals_.find(principal);
  if (it == principals_.end()) {
    throw Error(ErrorCode::kUnknownPrincipal, principal);
  }
  std::vector<crypto::KeyPair> out;
  for (std::size_t i : it->second) {
    if (persistent_only && !records_[i].persistent) continue;
    out.push_back(pairs_[i]);
  }
  return out;
}

std::vector<std::string> KeyInventory::principals() const {
  std::vector<std::string> out;
  for (const auto& [name, unused] : principals_) out.push_back(name);
  return out;
}

}  // namespace anoncloud::simnet
