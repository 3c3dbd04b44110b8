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

#include <gtest/gtest.h>

#include <set>

#include "anoncloud/error.h"
#include "anoncloud/prng.h"

namespace anoncloud::crypto {
namespace {

Bytes B(std::string_view s) { return ToBytes(s); }

std::vector<KeyPair> Keys(std::size_t n, std::uint64_t base = 1000) {
  std::vector<KeyPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(GenerateKeyPair(base + i));
  return out;
}

std::vector<Hop> Route(const std::vector<KeyPair>& keys) {
  std::vector<Hop> route;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    route.push_back({Pseudonym("hop-" + std::to_string(i)), keys[i].public_part});
  }
  return route;
}

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

TEST(KeyPairTest, SameSeedSameKey) {
  EXPECT_EQ(GenerateKeyPair(0), GenerateKeyPair(0));
}

TEST(KeyPairTest, DifferentSeedsDifferentIds) {
  EXPECT_NE(GenerateKeyPair(0).key_id, GenerateKeyPair(1).key_id);
}

TEST(KeyPairTest, HundredSeedsHundredIds) {
  std::set<KeyId> ids;
  for (std::uint64_t seed = 0; seed < 100; ++seed) ids.insert(GenerateKeyPair(seed).key_id);
  EXPECT_EQ(ids.size(), 100u);
}

TEST(SealTest, RoundTrip) {
  KeyPair manager = GenerateKeyPair(1);
  EXPECT_EQ(Open(Seal(B("T-request"), manager.public_part), manager), B("T-request"));
}

TEST(SealTest, WrongRecipient) {
  KeyPair manager = GenerateKeyPair(1);
  KeyPair master = GenerateKeyPair(2);
  SealedBox box = Seal(B("x"), manager.public_part);
  EXPECT_EQ(CodeOf([&] { Open(box, master); }), ErrorCode::kWrongRecipient);
}

TEST(SealTest, EmptyPayloadRejected) {
  KeyPair manager = GenerateKeyPair(1);
  EXPECT_EQ(CodeOf([&] { Seal(B(""), manager.public_part); }), ErrorCode::kPrecondition);
}

TEST(SealTest, TruncatedBodyIsCorrupt) {
  KeyPair a = GenerateKeyPair(1);
  SealedBox box = Seal(B("payload"), a.public_part);
  box.body.resize(box.body.size() - 1);
  EXPECT_EQ(CodeOf([&] { Open(box, a); }), ErrorCode::kCorrupt);
  box.body.resize(10);
  EXPECT_EQ(CodeOf([&] { Open(box, a); }), ErrorCode::kCorrupt);
}

TEST(SealTest, ForgedKeyIdStillFailsAuthentication) {
  KeyPair a = GenerateKeyPair(1);
  KeyPair b = GenerateKeyPair(2);
  SealedBox box = Seal(B("secret"), a.public_part);
  box.recipient_key_id = b.key_id;
  EXPECT_EQ(CodeOf([&] { Open(box, b); }), ErrorCode::kCorrupt);
}

TEST(SealTest, RandomPayloadsRoundTrip) {
  Prng prng(5);
  KeyPair a = GenerateKeyPair(1);
  for (int i = 0; i < 50; ++i) {
    Bytes payload(1 + prng.Uniform(300));
    for (auto& byte : payload) byte = static_cast<std::uint8_t>(prng.Uniform(256));
    EXPECT_EQ(Open(Seal(payload, a.public_part), a), payload);
  }
}

TEST(SealTest, CodecRoundTrip) {
  KeyPair a = GenerateKeyPair(1);
  SealedBox box = Seal(B("abc"), a.public_part);
  EXPECT_EQ(DecodeSealedBox(Encode(box)), box);
  EXPECT_EQ(DecodePublicKey(Encode(a.public_part)), a.public_part);
  Bytes key = Encode(a.public_part);
  key.back() ^= 1;
  EXPECT_EQ(CodeOf([&] { DecodePublicKey(key); }), ErrorCode::kCorrupt);
}

TEST(OnionTest, ThreeHopRouteHasThreeLayers) {
  auto keys = Keys(3);
  EXPECT_EQ(WrapOnion(B("JOB"), Route(keys)).layer_count, 3u);
}

TEST(OnionTest, OneHopRouteIsASingleSeal) {
  auto keys = Keys(1);
  OnionPacket packet = WrapOnion(B("JOB"), Route(keys));
  EXPECT_EQ(packet.layer_count, 1u);
  PeelResult peeled = Peel(packet, keys[0]);
  EXPECT_TRUE(peeled.terminal());
  EXPECT_EQ(peeled.payload, B("JOB"));
}

TEST(OnionTest, PeelFirstHopNamesSecond) {
  auto keys = Keys(3);
  auto route = Route(keys);
  PeelResult peeled = Peel(WrapOnion(B("JOB"), route), keys[0]);
  ASSERT_FALSE(peeled.terminal());
  EXPECT_EQ(*peeled.next_hop, route[1].pseudonym);
  EXPECT_EQ(peeled.inner.layer_count, 2u);
}

TEST(OnionTest, PeelLastHopIsTerminal) {
  auto keys = Keys(3);
  OnionPacket packet = WrapOnion(B("JOB"), Route(keys));
  packet = Peel(packet, keys[0]).inner;
  packet = Peel(packet, keys[1]).inner;
  PeelResult last = Peel(packet, keys[2]);
  EXPECT_TRUE(last.terminal());
  EXPECT_EQ(last.payload, B("JOB"));
}

TEST(OnionTest, OutOfOrderKeyIsWrongRecipient) {
  auto keys = Keys(3);
  OnionPacket packet = WrapOnion(B("JOB"), Route(keys));
  EXPECT_EQ(CodeOf([&] { Peel(packet, keys[1]); }), ErrorCode::kWrongRecipient);
}

TEST(OnionTest, RejectsEmptyRouteAndDuplicateKeys) {
  auto keys = Keys(2);
  std::vector<Hop> empty;
  EXPECT_EQ(CodeOf([&] { WrapOnion(B("p"), empty); }), ErrorCode::kEmptyRoute);
  std::vector<Hop> dup = {{Pseudonym("a"), keys[0].public_part},
                          {Pseudonym("b"), keys[0].public_part}};
  EXPECT_EQ(CodeOf([&] { WrapOnion(B("p"), dup); }), ErrorCode::kDuplicateKey);
}

// Peel chain over routes of length 1..6, checked against the route itself.
TEST(OnionTest, PeelChainMatchesRoute) {
  Prng prng(77);
  for (std::size_t length = 1; length <= 6; ++length) {
    for (int trial = 0; trial < 10; ++trial) {
      auto keys = Keys(length, prng.Next() % 1'000'000);
      auto route = Route(keys);
      Bytes payload(1 + prng.Uniform(64));
      for (auto& byte : payload) byte = static_cast<std::uint8_t>(prng.Uniform(256));
      OnionPacket packet = WrapOnion(payload, route);
      ASSERT_EQ(packet.layer_count, length);
      for (std::size_t i = 0; i < length; ++i) {
        PeelResult peeled = Peel(packet, keys[i]);
        if (i + 1 < length) {
          ASSERT_FALSE(peeled.terminal());
          EXPECT_EQ(*peeled.next_hop, route[i + 1].pseudonym);
          EXPECT_EQ(peeled.inner.layer_count, length - i - 1);
          packet = peeled.inner;
        } else {
          ASSERT_TRUE(peeled.terminal());
          EXPECT_EQ(peeled.payload, payload);
        }
      }
    }
  }
}

TEST(OnionTest, LayerCountTamperingIsCorrupt) {
  auto keys = Keys(3);
  OnionPacket packet = WrapOnion(B("JOB"), Route(keys));
  packet.layer_count = 1;
  EXPECT_EQ(CodeOf([&] { Peel(packet, keys[0]); }), ErrorCode::kCorrupt);
}

TEST(OnionTest, CodecRoundTrip) {
  auto keys = Keys(4);
  OnionPacket packet = WrapOnion(B("JOB"), Route(keys));
  EXPECT_EQ(DecodeOnion(Encode(packet)), packet);
}

TEST(OnionTest, DeterministicForSameInputs) {
  auto keys = Keys(3);
  EXPECT_EQ(WrapOnion(B("JOB"), Route(keys)), WrapOnion(B("JOB"), Route(keys)));
}

TEST(ReplyTest, LayersAddedOnReturnUnwrapAtOriginator) {
  KeyPair origin = GenerateKeyPair(9);
  OnionPacket reply = StartReply(B("answer"), origin.public_part);
  reply = AddReplyLayer(reply, origin.public_part);
  reply = AddReplyLayer(reply, origin.public_part);
  EXPECT_EQ(reply.layer_count, 3u);
  EXPECT_EQ(UnwrapReply(reply, origin), B("answer"));
  KeyPair other = GenerateKeyPair(10);
  EXPECT_EQ(CodeOf([&] { UnwrapReply(reply, other); }), ErrorCode::kWrongRecipient);
}

TEST(ReplyTest, ForwardPeelRefusesReplyPackets) {
  KeyPair origin = GenerateKeyPair(9);
  OnionPacket reply = AddReplyLayer(StartReply(B("answer"), origin.public_part),
                                    origin.public_part);
  EXPECT_EQ(CodeOf([&] { Peel(reply, origin); }), ErrorCode::kCorrupt);
}

}  // namespace
}  // namespace anoncloud::crypto
