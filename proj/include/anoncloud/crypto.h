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

#ifndef ANONCLOUD_CRYPTO_H_
#define ANONCLOUD_CRYPTO_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anoncloud/bytes.h"
#include "anoncloud/ids.h"

// Sealed-box envelopes and onion layering. There is no key agreement and no
// session key anywhere: every layer is sealed directly to the recipient's
// public key.
namespace anoncloud::crypto {

inline constexpr std::size_t kKeyBytes = 32;

struct PublicKey {
  KeyId id;
  std::array<std::uint8_t, kKeyBytes> bytes{};

  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct KeyPair {
  KeyId key_id;
  PublicKey public_part;
  std::array<std::uint8_t, kKeyBytes> secret_part{};

  friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

// Same seed, same key pair. Distinct seeds give distinct key ids.
KeyPair GenerateKeyPair(std::uint64_t seed);

struct SealedBox {
  KeyId recipient_key_id;
  Bytes body;

  friend bool operator==(const SealedBox&, const SealedBox&) = default;
};

// Deterministic: sealing the same payload to the same key twice yields the
// same box. Throws kPrecondition on an empty payload.
SealedBox Seal(std::span<const std::uint8_t> payload, const PublicKey& recipient);
// Throws kWrongRecipient if `kp` is not the box's recipient and kCorrupt if
// the body fails its integrity check.
Bytes Open(const SealedBox& box, const KeyPair& kp);

struct Hop {
  Pseudonym pseudonym;
  PublicKey key;
};

struct OnionPacket {
  std::size_t layer_count = 0;
  SealedBox outer;

  friend bool operator==(const OnionPacket&, const OnionPacket&) = default;
};

// Layer plaintext, in wire order: marker, next-hop pseudonym, inner length,
// inner body.
enum class LayerMarker : std::uint8_t {
  kRelay = 0x01,     // forward to `next_hop`; inner is the next sealed layer
  kTerminal = 0x02,  // inner is the payload
  kReply = 0x03,     // return-path wrap added by a relay; inner is a layer
};

struct Layer {
  LayerMarker marker = LayerMarker::kTerminal;
  Pseudonym next_hop;  // empty unless kRelay
  Bytes inner;
};

Bytes EncodeLayer(const Layer& layer);
Layer DecodeLayer(std::span<const std::uint8_t> data);

// Route order is travel order: route[0] receives the packet first and the
// payload is sealed for route.back(). Throws kEmptyRoute and kDuplicateKey.
OnionPacket WrapOnion(std::span<const std::uint8_t> payload,
                      std::span<const Hop> route);

struct PeelResult {
  std::optional<Pseudonym> next_hop;  // nullopt at the terminal layer
  OnionPacket inner;                  // valid when next_hop is set
  Bytes payload;                      // valid at the terminal layer

  bool terminal() const { return !next_hop.has_value(); }
};

PeelResult Peel(const OnionPacket& packet, const KeyPair& kp);

// Return path: a relay wraps whatever it received in one more layer sealed to
// the originator; the originator strips all of them with UnwrapReply.
OnionPacket StartReply(std::span<const std::uint8_t> payload,
                       const PublicKey& originator);
OnionPacket AddReplyLayer(const OnionPacket& packet,
                          const PublicKey& originator);
Bytes UnwrapReply(const OnionPacket& packet, const KeyPair& originator);

// Wire encodings. Each starts with a one-byte tag ('S', 'O', 'K') so mixed
// streams can be told apart.
Bytes Encode(const SealedBox& box);
Bytes Encode(const OnionPacket& packet);
Bytes Encode(const PublicKey& key);
SealedBox DecodeSealedBox(std::span<const std::uint8_t> data);
OnionPacket DecodeOnion(std::span<const std::uint8_t> data);
PublicKey DecodePublicKey(std::span<const std::uint8_t> data);

inline constexpr std::uint8_t kSealedTag = 'S';
inline constexpr std::uint8_t kOnionTag = 'O';
inline constexpr std::uint8_t kPublicKeyTag = 'K';

}  // namespace anoncloud::crypto

#endif  // ANONCLOUD_CRYPTO_H_
