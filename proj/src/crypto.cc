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

#include "anoncloud/crypto.h"

#include <sodium.h>

#include <set>

#include "anoncloud/error.h"

namespace anoncloud::crypto {

namespace {

void EnsureSodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw Error(ErrorCode::kPrecondition, "libsodium init failed");
}

template <std::size_t N>
std::array<std::uint8_t, N> Hash(std::span<const std::uint8_t> a,
                                 std::span<const std::uint8_t> b = {},
                                 std::span<const std::uint8_t> c = {}) {
  std::array<std::uint8_t, N> out{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, N);
  crypto_generichash_update(&st, a.data(), a.size());
  crypto_generichash_update(&st, b.data(), b.size());
  crypto_generichash_update(&st, c.data(), c.size());
  crypto_generichash_final(&st, out.data(), N);
  return out;
}

constexpr std::string_view kKeyDomain = "anoncloud.key.v1";
constexpr std::string_view kSealDomain = "anoncloud.seal.v1";

std::span<const std::uint8_t> AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

KeyId KeyIdFor(const std::array<std::uint8_t, kKeyBytes>& pk) {
  auto digest = Hash<8>(pk);
  return KeyId("k" + HexEncode(digest));
}

std::array<std::uint8_t, crypto_box_NONCEBYTES> NonceFor(
    std::span<const std::uint8_t> ephemeral_pk,
    std::span<const std::uint8_t> recipient_pk) {
  return Hash<crypto_box_NONCEBYTES>(ephemeral_pk, recipient_pk);
}

}  // namespace

KeyPair GenerateKeyPair(std::uint64_t seed) {
  EnsureSodium();
  ByteWriter w;
  w.U64(seed);
  auto key_seed = Hash<crypto_box_SEEDBYTES>(AsBytes(kKeyDomain), w.bytes());
  KeyPair kp;
  crypto_box_seed_keypair(kp.public_part.bytes.data(), kp.secret_part.data(),
                          key_seed.data());
  kp.key_id = KeyIdFor(kp.public_part.bytes);
  kp.public_part.id = kp.key_id;
  return kp;
}

// A libsodium sealed box with the ephemeral key derived from (recipient,
// payload) instead of drawn at random, which makes sealing a pure function.
SealedBox Seal(std::span<const std::uint8_t> payload,
               const PublicKey& recipient) {
  EnsureSodium();
  if (payload.empty()) throw Error(ErrorCode::kPrecondition, "empty payload");
  auto eseed = Hash<crypto_box_SEEDBYTES>(AsBytes(kSealDomain),
                                          recipient.bytes, payload);
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> epk{};
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> esk{};
  crypto_box_seed_keypair(epk.data(), esk.data(), eseed.data());
  auto nonce = NonceFor(epk, recipient.bytes);

  SealedBox box;
  box.recipient_key_id = recipient.id;
  box.body.resize(epk.size() + crypto_box_MACBYTES + payload.size());
  std::copy(epk.begin(), epk.end(), box.body.begin());
  if (crypto_box_easy(box.body.data() + epk.size(), payload.data(),
                      payload.size(), nonce.data(), recipient.bytes.data(),
                      esk.data()) != 0) {
    sodium_memzero(esk.data(), esk.size());
    throw Error(ErrorCode::kPrecondition, "recipient key rejected");
  }
  sodium_memzero(esk.data(), esk.size());
  return box;
}

Bytes Open(const SealedBox& box, const KeyPair& kp) {
  EnsureSodium();
  if (box.recipient_key_id != kp.key_id) {
    throw Error(ErrorCode::kWrongRecipient,
                "box for " + box.recipient_key_id.str() + " opened with " +
                    kp.key_id.str());
  }
  constexpr std::size_t kOverhead =
      crypto_box_PUBLICKEYBYTES + crypto_box_MACBYTES;
  if (box.body.size() <= kOverhead) {
    throw Error(ErrorCode::kCorrupt, "sealed body too short");
  }
  std::span<const std::uint8_t> epk(box.body.data(), crypto_box_PUBLICKEYBYTES);
  auto nonce = NonceFor(epk, kp.public_part.bytes);
  Bytes plain(box.body.size() - kOverhead);
  if (crypto_box_open_easy(plain.data(),
                           box.body.data() + crypto_box_PUBLICKEYBYTES,
                           box.body.size() - crypto_box_PUBLICKEYBYTES,
                           nonce.data(), epk.data(),
                           kp.secret_part.data()) != 0) {
    throw Error(ErrorCode::kCorrupt, "sealed body failed authentication");
  }
  return plain;
}

Bytes EncodeLayer(const Layer& layer) {
  ByteWriter w;
  w.U8(static_cast<std::uint8_t>(layer.marker));
  w.ShortString(layer.next_hop.str());
  w.Blob(layer.inner);
  return std::move(w).Take();
}

Layer DecodeLayer(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  Layer layer;
  std::uint8_t marker = r.U8();
  if (marker < 0x01 || marker > 0x03) {
    throw Error(ErrorCode::kCorrupt, "unknown layer marker");
  }
  layer.marker = static_cast<LayerMarker>(marker);
  layer.next_hop = Pseudonym(r.ShortString());
  layer.inner = r.Blob();
  r.ExpectEnd();
  if ((layer.marker == LayerMarker::kRelay) == layer.next_hop.empty()) {
    throw Error(ErrorCode::kCorrupt, "next hop present iff relay layer");
  }
  return layer;
}

OnionPacket WrapOnion(std::span<const std::uint8_t> payload,
                      std::span<const Hop> route) {
  if (route.empty()) throw Error(ErrorCode::kEmptyRoute, "route is empty");
  std::set<KeyId> seen;
  for (const Hop& hop : route) {
    if (!seen.insert(hop.key.id).second) {
      throw Error(ErrorCode::kDuplicateKey,
                  "hop key " + hop.key.id.str() + " repeats in route");
    }
  }
  if (payload.empty()) throw Error(ErrorCode::kPrecondition, "empty payload");

  Layer terminal{LayerMarker::kTerminal, Pseudonym(),
                 Bytes(payload.begin(), payload.end())};
  SealedBox box = Seal(EncodeLayer(terminal), route.back().key);
  for (std::size_t i = route.size() - 1; i-- > 0;) {
    Layer relay{LayerMarker::kRelay, route[i + 1].pseudonym, Encode(box)};
    box = Seal(EncodeLayer(relay), route[i].key);
  }
  return OnionPacket{route.size(), std::move(box)};
}

PeelResult Peel(const OnionPacket& packet, const KeyPair& kp) {
  Layer layer = DecodeLayer(Open(packet.outer, kp));
  PeelResult result;
  switch (layer.marker) {
    case LayerMarker::kRelay:
      if (packet.layer_count < 2) {
        throw Error(ErrorCode::kCorrupt, "relay layer on a 1-layer packet");
      }
      result.next_hop = layer.next_hop;
      result.inner = OnionPacket{packet.layer_count - 1,
                                 DecodeSealedBox(layer.inner)};
      return result;
    case LayerMarker::kTerminal:
      if (packet.layer_count != 1) {
        throw Error(ErrorCode::kCorrupt, "terminal layer before last hop");
      }
      result.payload = std::move(layer.inner);
      return result;
    case LayerMarker::kReply:
      break;
  }
  throw Error(ErrorCode::kCorrupt, "reply layer in a forward onion");
}

OnionPacket StartReply(std::span<const std::uint8_t> payload,
                       const PublicKey& originator) {
  if (payload.empty()) throw Error(ErrorCode::kPrecondition, "empty payload");
  Layer terminal{LayerMarker::kTerminal, Pseudonym(),
                 Bytes(payload.begin(), payload.end())};
  return OnionPacket{1, Seal(EncodeLayer(terminal), originator)};
}

OnionPacket AddReplyLayer(const OnionPacket& packet,
                          const PublicKey& originator) {
  Layer wrap{LayerMarker::kReply, Pseudonym(), Encode(packet.outer)};
  return OnionPacket{packet.layer_count + 1,
                     Seal(EncodeLayer(wrap), originator)};
}

Bytes UnwrapReply(const OnionPacket& packet, const KeyPair& originator) {
  SealedBox box = packet.outer;
  for (std::size_t depth = packet.layer_count; depth > 0; --depth) {
    Layer layer = DecodeLayer(Open(box, originator));
    if (layer.marker == LayerMarker::kTerminal) {
      if (depth != 1) throw Error(ErrorCode::kCorrupt, "short reply chain");
      return std::move(layer.inner);
    }
    if (layer.marker != LayerMarker::kReply) {
      throw Error(ErrorCode::kCorrupt, "relay layer in a reply");
    }
    box = DecodeSealedBox(layer.inner);
  }
  throw Error(ErrorCode::kCorrupt, "reply without terminal layer");
}

Bytes Encode(const SealedBox& box) {
  ByteWriter w;
  w.U8(kSealedTag);
  w.ShortString(box.recipient_key_id.str());
  w.Blob(box.body);
  return std::move(w).Take();
}

Bytes Encode(const OnionPacket& packet) {
  if (packet.layer_count == 0 || packet.layer_count > 255) {
    throw Error(ErrorCode::kPrecondition, "layer count out of range");
  }
  ByteWriter w;
  w.U8(kOnionTag);
  w.U8(static_cast<std::uint8_t>(packet.layer_count));
  w.Raw(Encode(packet.outer));
  return std::move(w).Take();
}

Bytes Encode(const PublicKey& key) {
  ByteWriter w;
  w.U8(kPublicKeyTag);
  w.ShortString(key.id.str());
  w.Raw(key.bytes);
  return std::move(w).Take();
}

namespace {

SealedBox ReadSealedBox(ByteReader& r) {
  if (r.U8() != kSealedTag) throw Error(ErrorCode::kCorrupt, "not a sealed box");
  SealedBox box;
  box.recipient_key_id = KeyId(r.ShortString());
  box.body = r.Blob();
  return box;
}

}  // namespace

SealedBox DecodeSealedBox(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  SealedBox box = ReadSealedBox(r);
  r.ExpectEnd();
  return box;
}

OnionPacket DecodeOnion(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  if (r.U8() != kOnionTag) throw Error(ErrorCode::kCorrupt, "not an onion");
  OnionPacket packet;
  packet.layer_count = r.U8();
  if (packet.layer_count == 0) throw Error(ErrorCode::kCorrupt, "zero layers");
  packet.outer = ReadSealedBox(r);
  r.ExpectEnd();
  return packet;
}

PublicKey DecodePublicKey(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  if (r.U8() != kPublicKeyTag) throw Error(ErrorCode::kCorrupt, "not a key");
  PublicKey key;
  key.id = KeyId(r.ShortString());
  auto raw = r.Raw(kKeyBytes);
  std::copy(raw.begin(), raw.end(), key.bytes.begin());
  r.ExpectEnd();
  if (KeyIdFor(key.bytes) != key.id) {
    throw Error(ErrorCode::kCorrupt, "key id does not match key bytes");
  }
  return key;
}

}  // namespace anoncloud::crypto
