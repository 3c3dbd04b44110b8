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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anoncloud/compute.h"
#include "anoncloud/config.h"
#include "anoncloud/crypto.h"
#include "anoncloud/directory.h"
#include "anoncloud/error.h"
#include "anoncloud/job.h"
#include "anoncloud/knowledge.h"
#include "anoncloud/report.h"
#include "anoncloud/trace.h"
#include "anoncloud/world.h"

namespace anoncloud {
namespace {

using scenario::RunOutcome;
using scenario::ScenarioConfig;

// Scale sweep tolerance: per-envelope time at any size may be at most this
// multiple of the smallest size's.
constexpr double kScaleFactor = 2.0;
constexpr int kTimingRepeats = 7;
constexpr std::size_t kOnionPayloads = 200;
constexpr std::size_t kRotations = 100;
constexpr std::size_t kRegistryNodes = 20;

const std::vector<std::string> kSuite = {"canonical.yaml", "prepaid.yaml", "mixed.yaml",
                                         "random50.yaml", "replay_fault.yaml"};

ScenarioConfig Load(const std::string& name) {
  return scenario::LoadConfig(std::string(ANONCLOUD_SCENARIO_DIR) + "/" + name);
}

// Collects failure reasons for one criterion.
struct Criterion {
  std::vector<std::string> failures;
  std::string note;
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string Oracle(const std::string& job) {
  return compute::FormatValue(compute::Evaluate(compute::ParseJob(job)));
}

// End-to-end run in both payment modes.
void EndToEnd(Criterion& c) {
  for (const char* name : {"canonical.yaml", "prepaid.yaml"}) {
    ScenarioConfig config = Load(name);
    scenario::World world(config);
    world.Run();
    scenario::Trace trace = world.Export();
    c.Expect(!world.livelock(), std::string(name) + ": livelock");
    c.Expect(!trace.sessions.empty(), std::string(name) + ": no sessions");
    c.Expect(world.manager().live_agents() == 0, std::string(name) + ": live agent left");
    std::set<std::string> killed;
    for (const auto& e : trace.events) {
      if (e.name == "agent-killed") killed.insert(e.session.str());
    }
    for (const auto& s : trace.sessions) {
      const std::string tag = std::string(name) + " " + s.customer + ": ";
      c.Expect(s.result == Oracle(s.job),
               tag + "result " + s.result.value_or("<none>") + " != " + Oracle(s.job));
      const manager::Token* token = world.ledger().Find(s.token);
      c.Expect(token && token->state == manager::TokenState::kRedeemed,
               tag + "token not redeemed");
      c.Expect(killed.contains(s.session.str()), tag + "agent never killed");
      std::size_t records = 0;
      for (const auto& r : trace.billing) records += r.token_id == s.token;
      c.Expect(records == 1, tag + std::to_string(records) + " billing records");
    }
    c.Expect(trace.billing.size() == trace.sessions.size(),
             std::string(name) + ": record count differs from session count");
  }
}

bool Contains(const Bytes& haystack, const std::string& needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

// Onion round trips, off-position keys and hop-blindness.
void OnionSuite(Criterion& c) {
  Prng prng(4242);
  std::uint64_t key_seed = 1'000'000;
  std::size_t attempts = 0;
  for (std::size_t length = 3; length <= 8; ++length) {
    for (std::size_t p = 0; p < kOnionPayloads; ++p) {
      std::vector<crypto::KeyPair> keys;
      std::vector<crypto::Hop> route;
      for (std::size_t i = 0; i < length; ++i) {
        keys.push_back(crypto::GenerateKeyPair(key_seed++));
        route.push_back({Pseudonym("n-" + prng.Hex(8)), keys.back().public_part});
      }
      const std::string marker = "PAYLOAD-" + prng.Hex(8);
      Bytes payload = ToBytes(marker);
      const auto extra = prng.Uniform(256);
      for (std::uint64_t i = 0; i < extra; ++i) payload.push_back(static_cast<std::uint8_t>(prng.Next()));

      crypto::OnionPacket packet = crypto::WrapOnion(payload, route);
      const std::string tag = "length " + std::to_string(length) + " payload " + std::to_string(p);
      for (std::size_t i = 0; i < length; ++i) {
        for (std::size_t j = 0; j < length; ++j) {
          if (j == i) continue;
          ++attempts;
          bool rejected = false;
          try {
            crypto::Peel(packet, keys[j]);
          } catch (const Error&) {
            rejected = true;
          }
          c.Expect(rejected, tag + ": hop " + std::to_string(j) + " opened layer " +
                                 std::to_string(i));
        }
        Bytes readable = crypto::Open(packet.outer, keys[i]);
        crypto::PeelResult peeled = crypto::Peel(packet, keys[i]);
        const bool last = i + 1 == length;
        if (!last) {
          c.Expect(Contains(readable, route[i + 1].pseudonym.str()), tag + ": next hop missing");
          c.Expect(!Contains(readable, marker), tag + ": payload readable at hop " + std::to_string(i));
          for (std::size_t k = 0; k < length; ++k) {
            if (k == i + 1) continue;
            c.Expect(!Contains(readable, route[k].pseudonym.str()),
                     tag + ": hop " + std::to_string(i) + " sees hop " + std::to_string(k));
          }
          c.Expect(!peeled.terminal() && *peeled.next_hop == route[i + 1].pseudonym,
                   tag + ": wrong next hop");
          packet = peeled.inner;
        } else {
          c.Expect(peeled.terminal() && peeled.payload == payload, tag + ": round trip differs");
          for (const auto& hop : route) {
            c.Expect(!Contains(readable, hop.pseudonym.str()), tag + ": terminal sees a hop");
          }
        }
      }
    }
  }
  c.note = std::to_string(6 * kOnionPayloads) + " onions, " + std::to_string(attempts) +
           " off-position attempts";
}

// Store scan after 50 randomized sessions.
void ManagerKnowledge(Criterion& c) {
  RunOutcome out = scenario::RunScenario(Load("random50.yaml"));
  c.Expect(out.trace.sessions.size() == 50,
           std::to_string(out.trace.sessions.size()) + " sessions instead of 50");
  std::set<std::string> kinds;
  for (const auto& entry : out.trace.store) {
    for (const auto& ref : out.trace.transcript.secrets.all()) {
      if (ref.value == entry.value) kinds.insert(std::string(simnet::SecretKindName(ref.kind)));
    }
  }
  const std::set<std::string> expected = {
      std::string(simnet::SecretKindName(simnet::SecretKind::kTokenId)),
      std::string(simnet::SecretKindName(simnet::SecretKind::kAmount)),
      std::string(simnet::SecretKindName(simnet::SecretKind::kPaymentReference))};
  std::string found;
  for (const auto& k : kinds) found += (found.empty() ? "" : ",") + k;
  c.Expect(kinds == expected, "store holds {" + found + "}");
  c.note = "store holds {" + found + "} over " + std::to_string(out.trace.store.size()) +
           " stored values";
}

directory::Directory Registry() {
  directory::Directory d;
  for (std::size_t i = 0; i < kRegistryNodes; ++i) {
    const bool master = i == 0;
    d.RegisterNode({TrueId("node-" + std::to_string(i)), Pseudonym("init-" + std::to_string(i)),
                    crypto::GenerateKeyPair(7000 + i).public_part,
                    master ? directory::NodeRole::kMaster : directory::NodeRole::kSlave});
  }
  return d;
}

// Rotation bijection, determinism and stale-circuit rejection.
void Rotation(Criterion& c) {
  directory::Directory a = Registry();
  directory::Directory b = Registry();
  Prng pa(99), pb(99), circuits(5);
  const crypto::KeyPair mn_keys = crypto::GenerateKeyPair(6999);
  manager::TokenLedger ledger;
  compute::MasterNode master(mn_keys, ledger, 0, Prng(1));
  simnet::Network network;
  std::size_t stale = 0;
  for (std::size_t r = 0; r < kRotations; ++r) {
    const std::string tag = "rotation " + std::to_string(r) + ": ";
    directory::Circuit old = a.BuildCircuit({1}, *a.master(), 3, circuits);
    std::set<Pseudonym> before;
    for (const auto& [id, node] : a.nodes()) before.insert(node.pseudonym);

    directory::PseudonymMapping ma = a.RotatePseudonyms(pa);
    directory::PseudonymMapping mb = b.RotatePseudonyms(pb);
    c.Expect(ma == mb, tag + "same seed, different mapping");

    std::set<Pseudonym> domain, image, after;
    for (const auto& [from, to] : ma) {
      domain.insert(from);
      image.insert(to);
    }
    for (const auto& [id, node] : a.nodes()) after.insert(node.pseudonym);
    c.Expect(domain == before, tag + "mapping does not cover the old names");
    c.Expect(image.size() == ma.size() && image == after, tag + "mapping is not a bijection");
    c.Expect(ma.size() == kRegistryNodes, tag + "mapping size");

    c.Expect(!a.IsCurrent(old), tag + "old circuit still current");
    protocol::ServiceOrder order;
    order.token_id = TokenId("t-" + std::to_string(r));
    order.session_id = SessionId("s-" + std::to_string(r));
    order.service_number = 1;
    order.job = "sum[1,2]";
    order.circuit = old;
    order.agent_hop = Pseudonym("agent");
    order.agent_key = mn_keys.public_part;
    order.reply_key = mn_keys.public_part;
    ledger.Issue(order.token_id, 1);
    master.SetEpoch(a.epoch().epoch_number);
    master.Authenticate(crypto::Seal(EncodeMessage(protocol::ToMessage(order)), mn_keys.public_part));
    try {
      master.Dispatch(order.session_id, master.Plan(order.session_id), network);
      c.Expect(false, tag + "stale circuit dispatched");
    } catch (const Error& e) {
      c.Expect(e.code() == ErrorCode::kStaleCircuit, tag + "wrong error " + e.what());
      stale += e.code() == ErrorCode::kStaleCircuit;
    }
  }
  c.note = std::to_string(kRotations) + " rotations, " + std::to_string(stale) +
           " stale circuits rejected";
}

// Linkage verdicts across the suite.
void Verdicts(Criterion& c) {
  std::size_t customers = 0;
  for (const auto& name : kSuite) {
    RunOutcome out = scenario::RunScenario(Load(name));
    for (simnet::AdversaryModel model : simnet::AllModels()) {
      simnet::LinkageVerdict v = simnet::LinkageReport(
          out.trace.transcript, simnet::AdversaryFor(model), out.trace.store);
      const std::string tag = name + " " + std::string(simnet::ModelName(model)) + ": ";
      c.Expect(!v.customers.empty(), tag + "no customers analysed");
      for (const auto& l : v.customers) {
        switch (model) {
          case simnet::AdversaryModel::kGlobalObserver:
            c.Expect(!l.content_linked && !l.sn_linked, tag + l.customer + " linked");
            break;
          case simnet::AdversaryModel::kManagerPostSession:
            c.Expect(!l.content_linked && !l.sn_linked, tag + l.customer + " beyond payment");
            c.Expect(l.payment_linked, tag + l.customer + " payment not linked");
            break;
          case simnet::AdversaryModel::kManagerMnCollusion:
            c.Expect(l.content_linked || l.sn_linked, tag + l.customer + " not linked");
            break;
        }
      }
      if (model == simnet::AdversaryModel::kGlobalObserver) customers += v.customers.size();
    }
  }
  c.note = std::to_string(kSuite.size()) + " scenarios, " + std::to_string(customers) +
           " sessions per model";
}

// Replay fault injection.
void TokenSingleUse(Criterion& c) {
  RunOutcome out = scenario::RunScenario(Load("replay_fault.yaml"));
  auto failing = out.report.failing();
  std::string list;
  for (const auto& f : failing) list += (list.empty() ? "" : ",") + f;
  c.Expect(failing == std::vector<std::string>{"token-single-use"}, "failing {" + list + "}");
  c.note = "failing {" + list + "}";
}

// Pass at several sizes; per-envelope run time stays within the factor.
void ScaleSweep(Criterion& c) {
  double base = 0;
  std::string note;
  for (std::size_t n : {3, 10, 100}) {
    ScenarioConfig config = scenario::CanonicalConfig();
    config.slave_nodes = n;
    RunOutcome out = scenario::RunScenario(config);
    for (const auto& f : out.report.failing()) {
      c.Expect(false, std::to_string(n) + " slaves: " + f);
    }
    double best = 1e30;
    std::size_t envelopes = 0;
    for (int rep = 0; rep < kTimingRepeats; ++rep) {
      scenario::World world(config);
      auto start = std::chrono::steady_clock::now();
      world.Run();
      auto stop = std::chrono::steady_clock::now();
      envelopes = world.network().deliveries();
      best = std::min(best, std::chrono::duration<double, std::micro>(stop - start).count());
    }
    const double per = best / static_cast<double>(envelopes);
    if (n == 3) base = per;
    char line[128];
    std::snprintf(line, sizeof line, "%sN=%zu %zu env %.1fus/env", note.empty() ? "" : "; ", n,
                  envelopes, per);
    note += line;
    c.Expect(per <= kScaleFactor * base,
             "N=" + std::to_string(n) + " per-envelope time exceeds the bound");
  }
  c.note = note;
}

// Same seed, same bytes.
void Determinism(Criterion& c) {
  for (const auto& name : kSuite) {
    ScenarioConfig config = Load(name);
    std::string a = scenario::TraceText(scenario::RunScenario(config).trace);
    std::string b = scenario::TraceText(scenario::RunScenario(config).trace);
    c.Expect(a == b, name + ": transcripts differ");
  }
  c.note = std::to_string(kSuite.size()) + " scenarios compared";
}

}  // namespace
}  // namespace anoncloud

int main() {
  using namespace anoncloud;
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"end-to-end postpaid and prepaid", EndToEnd},
      {"onion round trip and hop blindness", OnionSuite},
      {"manager keeps billing metadata only", ManagerKnowledge},
      {"pseudonym rotation", Rotation},
      {"adversary verdicts", Verdicts},
      {"token single use under replay", TokenSingleUse},
      {"scale sweep", ScaleSweep},
      {"determinism", Determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = c.failures.empty();
    failed += !pass;
    std::printf("criterion %zu %s: %s (%.2fs)%s%s\n", i + 1, criteria[i].first.c_str(),
                pass ? "PASS" : "FAIL", secs, c.note.empty() ? "" : " ", c.note.c_str());
    for (std::size_t k = 0; k < c.failures.size() && k < 10; ++k) {
      std::printf("    %s\n", c.failures[k].c_str());
    }
  }
  return failed == 0 ? 0 : 1;
}
