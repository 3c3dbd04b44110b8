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

#ifndef ANONCLOUD_PROBE_H_
#define ANONCLOUD_PROBE_H_

#include <cstdint>
#include <functional>
#include <string>

#include "anoncloud/crypto.h"
#include "anoncloud/ids.h"
#include "anoncloud/prng.h"
#include "anoncloud/transcript.h"

namespace anoncloud::simnet {

// Ground-truth instrumentation handed to actors. Actors report the secrets
// they mint and their lifecycle events here; nothing reported flows back into
// the protocol. Every hook is optional.
struct Probe {
  std::function<void(SecretRef)> secret;
  // Mints a per-session key for `principal`. Falls back to a locally seeded
  // key when unset.
  std::function<crypto::KeyPair(const std::string& principal,
                                const SessionId& session)>
      session_key;
  std::function<void(const std::string& event, const SessionId& session,
                     const std::string& detail)>
      event;

  void Secret(SecretKind kind, std::string value, SessionId session = {},
              std::string owner = {}) const {
    if (secret) secret({kind, std::move(value), std::move(session), std::move(owner)});
  }
  void Event(const std::string& name, const SessionId& session,
             const std::string& detail = {}) const {
    if (event) event(name, session, detail);
  }
  crypto::KeyPair SessionKey(const std::string& principal,
                             const SessionId& session, Prng& fallback) const {
    if (session_key) return session_key(principal, session);
    return crypto::GenerateKeyPair(fallback.Next());
  }
};

}  // namespace anoncloud::simnet

#endif  // ANONCLOUD_PROBE_H_
