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

#include "anoncloud/directory.h"

#include <gtest/gtest.h>

#include <set>

#include "anoncloud/error.h"

namespace anoncloud::directory {
namespace {

NodeRecord Node(const std::string& id, NodeRole role = NodeRole::kSlave) {
  static std::uint64_t seed = 500;
  return {TrueId(id), Pseudonym("p-" + id),
          crypto::GenerateKeyPair(seed++).public_part, role};
}

// A registry of `slaves` slave nodes plus one master.
Directory Registry(std::size_t slaves) {
  Directory d;
  d.RegisterNode(Node("mn", NodeRole::kMaster));
  for (std::size_t i = 0; i < slaves; ++i) d.RegisterNode(Node("sn" + std::to_string(i)));
  return d;
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kPrecondition;
}

TEST(RegisterTest, FreshNodeIsListed) {
  Directory d;
  d.RegisterNode(Node("a"));
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.CurrentList("manager").size(), 1u);
}

TEST(RegisterTest, DuplicateTrueIdRejected) {
  Directory d;
  d.RegisterNode(Node("a"));
  NodeRecord again = Node("a");
  again.pseudonym = Pseudonym("other");
  EXPECT_EQ(CodeOf([&] { d.RegisterNode(again); }), ErrorCode::kDuplicateRegistration);
}

TEST(RegisterTest, DuplicatePseudonymRejected) {
  Directory d;
  d.RegisterNode(Node("a"));
  NodeRecord b = Node("b");
  b.pseudonym = Pseudonym("p-a");
  EXPECT_EQ(CodeOf([&] { d.RegisterNode(b); }), ErrorCode::kDuplicateRegistration);
}

TEST(RegisterTest, FiftySlavesAndAMaster) {
  Directory d = Registry(50);
  EXPECT_EQ(d.size(), 51u);
  EXPECT_EQ(d.slave_count(), 50u);
}

TEST(RotateTest, EmptyRegistryStillAdvancesEpoch) {
  Directory d;
  Prng prng(1);
  EXPECT_TRUE(d.RotatePseudonyms(prng).empty());
  EXPECT_EQ(d.epoch().epoch_number, 1u);
}

TEST(RotateTest, SameSeedSameMapping) {
  Directory a = Registry(10);
  Directory b = Registry(10);
  Prng pa(33), pb(33);
  EXPECT_EQ(a.RotatePseudonyms(pa), b.RotatePseudonyms(pb));
}

TEST(RotateTest, MappingIsABijectionOntoFreshNames) {
  Directory d = Registry(10);
  std::set<Pseudonym> before;
  for (const auto& [id, node] : d.nodes()) before.insert(node.pseudonym);
  Prng prng(8);
  PseudonymMapping mapping = d.RotatePseudonyms(prng);
  std::set<Pseudonym> keys, values;
  for (const auto& [old_name, new_name] : mapping) {
    keys.insert(old_name);
    values.insert(new_name);
  }
  EXPECT_EQ(keys, before);
  EXPECT_EQ(values.size(), before.size());
  for (const auto& name : values) EXPECT_FALSE(before.contains(name));
  std::set<Pseudonym> listed;
  for (const auto& view : d.CurrentList("manager")) listed.insert(view.pseudonym);
  EXPECT_EQ(listed, values);
}

TEST(RotateTest, TrueIdsNeverChange) {
  Directory d = Registry(5);
  std::set<TrueId> before;
  for (const auto& [id, node] : d.nodes()) before.insert(id);
  Prng prng(2);
  for (int i = 0; i < 5; ++i) d.RotatePseudonyms(prng);
  std::set<TrueId> after;
  for (const auto& [id, node] : d.nodes()) after.insert(node.true_id);
  EXPECT_EQ(before, after);
}

TEST(CircuitTest, TwoSlavesPlusMaster) {
  Directory d = Registry(5);
  Prng prng(4);
  Circuit c = d.BuildCircuit({1}, *d.master(), 3, prng);
  ASSERT_EQ(c.hops.size(), 3u);
  EXPECT_EQ(c.master().pseudonym, d.master()->pseudonym);
  EXPECT_EQ(ValidateCircuit(c, 3, d.master()->pseudonym), "");
}

TEST(CircuitTest, OneSlaveIsNotEnough) {
  Directory d = Registry(1);
  Prng prng(4);
  EXPECT_EQ(CodeOf([&] { d.BuildCircuit({1}, *d.master(), 3, prng); }),
            ErrorCode::kCapacity);
}

TEST(CircuitTest, ShortCircuitRejected) {
  Directory d = Registry(5);
  Prng prng(4);
  EXPECT_EQ(CodeOf([&] { d.BuildCircuit({1}, *d.master(), 2, prng); }),
            ErrorCode::kPrecondition);
}

TEST(CircuitTest, SameSeedSameHops) {
  Directory a = Registry(10);
  Directory b = Registry(10);
  Prng pa(12), pb(12);
  Circuit ca = a.BuildCircuit({1}, *a.master(), 4, pa);
  Circuit cb = b.BuildCircuit({1}, *b.master(), 4, pb);
  ASSERT_EQ(ca.hops.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ca.hops[i].pseudonym, cb.hops[i].pseudonym);
}

TEST(CircuitTest, RandomCircuitsAreValid) {
  Directory d = Registry(12);
  Prng prng(99);
  for (std::size_t length = 3; length <= 8; ++length) {
    for (int i = 0; i < 20; ++i) {
      Circuit c = d.BuildCircuit({1}, *d.master(), length, prng);
      EXPECT_EQ(ValidateCircuit(c, 3, d.master()->pseudonym), "");
      EXPECT_EQ(c.hops.size(), length);
    }
  }
}

TEST(CircuitTest, ValidateNamesTheBrokenRule) {
  Directory d = Registry(5);
  Prng prng(4);
  Circuit c = d.BuildCircuit({1}, *d.master(), 4, prng);
  Circuit shorter = c;
  shorter.hops.erase(shorter.hops.begin(), shorter.hops.begin() + 2);
  EXPECT_EQ(ValidateCircuit(shorter, 3, d.master()->pseudonym), "min-length");
  Circuit repeated = c;
  repeated.hops[1] = repeated.hops[0];
  EXPECT_EQ(ValidateCircuit(repeated, 3, d.master()->pseudonym), "distinct-hops");
  Circuit reversed = c;
  std::swap(reversed.hops.front(), reversed.hops.back());
  EXPECT_EQ(ValidateCircuit(reversed, 3, d.master()->pseudonym), "master-terminal");
}

TEST(CircuitTest, RotationMakesOldCircuitsStale) {
  Directory d = Registry(5);
  Prng prng(4);
  Circuit c = d.BuildCircuit({1}, *d.master(), 3, prng);
  EXPECT_TRUE(d.IsCurrent(c));
  d.RotatePseudonyms(prng);
  EXPECT_FALSE(d.IsCurrent(c));
}

TEST(ListTest, CustomerIsDenied) {
  Directory d = Registry(3);
  EXPECT_EQ(CodeOf([&] { d.CurrentList("customer-alice"); }), ErrorCode::kAccessDenied);
}

TEST(ListTest, ManagerSeesPseudonymsAndKeys) {
  Directory d = Registry(3);
  auto list = d.CurrentList("manager");
  EXPECT_EQ(list.size(), 4u);
  for (const auto& view : list) EXPECT_FALSE(view.pseudonym.empty());
}

TEST(ListTest, AfterRotationOnlyCurrentNames) {
  Directory d = Registry(6);
  std::set<Pseudonym> old_names;
  for (const auto& view : d.CurrentList("manager")) old_names.insert(view.pseudonym);
  Prng prng(3);
  d.RotatePseudonyms(prng);
  for (const auto& view : d.CurrentList("manager")) {
    EXPECT_FALSE(old_names.contains(view.pseudonym));
    EXPECT_NE(d.FindByPseudonym(view.pseudonym), nullptr);
  }
}

}  // namespace
}  // namespace anoncloud::directory
