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

#include "anoncloud/report.h"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "anoncloud/crypto.h"
#include "anoncloud/error.h"
#include "anoncloud/job.h"
#include "anoncloud/protocol.h"
#include "anoncloud/world.h"

namespace anoncloud::scenario {

using simnet::SecretKind;

namespace {

constexpr std::string_view kFixedAddresses[] = {"manager", "ds", "bank"};
constexpr std::string_view kMnStates[] = {"authenticating", "dispatching",
                                          "aggregating", "done"};

// Collects failures for one invariant; passes when none were added.
class Check {
 public:
  explicit Check(std::string name) : name_(std::move(name)) {}
  void Fail(const std::string& why) {
    if (failures_++ < 3) detail_ += (detail_.empty() ? "" : "; ") + why;
  }
  void Note(const std::string& note) { note_ = note; }
  InvariantResult Result() const {
    std::string detail = detail_;
    if (failures_ > 3) detail += "; " + std::to_string(failures_ - 3) + " more";
    return {name_, failures_ == 0, failures_ == 0 ? note_ : detail};
  }

 private:
  std::string name_;
  std::string detail_;
  std::string note_;
  std::size_t failures_ = 0;
};

std::map<SessionId, std::uint64_t> FirstEventTick(const Trace& trace,
                                                  std::string_view name) {
  std::map<SessionId, std::uint64_t> out;
  for (const ProbeRecord& e : trace.events) {
    if (e.name == name) out.try_emplace(e.session, e.tick);
  }
  return out;
}

const EpochRecord* EpochAt(const Trace& trace, std::uint64_t tick) {
  const EpochRecord* current = nullptr;
  for (const EpochRecord& epoch : trace.epochs) {
    if (epoch.tick < tick || (current == nullptr && epoch.tick <= tick)) {
      current = &epoch;
    }
  }
  return current;
}

const EpochRecord* EpochNumbered(const Trace& trace, std::uint64_t number) {
  for (const EpochRecord& epoch : trace.epochs) {
    if (epoch.epoch == number) return &epoch;
  }
  return nullptr;
}

InvariantResult Quiescence(const Trace& trace) {
  Check check("quiescence");
  if (trace.livelock) check.Fail(*trace.livelock);
  return check.Result();
}

InvariantResult SessionCompletion(const Trace& trace) {
  Check check("session-completion");
  auto killed = FirstEventTick(trace, "agent-killed");
  std::map<TokenId, manager::TokenState> states;
  for (const auto& token : trace.tokens) states[token.token_id] = token.state;
  for (const SessionRecord& s : trace.sessions) {
    const std::string who = s.customer + "/" + s.session.str();
    if (s.session.empty()) {
      check.Fail(s.customer + " never received a token");
      continue;
    }
    std::string expected;
    try {
      expected = compute::FormatValue(compute::Evaluate(compute::ParseJob(s.job)));
    } catch (const Error& e) {
      check.Fail(who + " job does not evaluate: " + e.what());
      continue;
    }
    if (!s.result) {
      check.Fail(who + " has no result");
    } else if (*s.result != expected) {
      check.Fail(who + " result " + *s.result + " != " + expected);
    }
    if (!s.torn_down) check.Fail(who + " was not torn down");
    if (!killed.contains(s.session)) check.Fail(who + " agent still alive");
    auto state = states.find(s.token);
    if (state == states.end() || state->second != manager::TokenState::kRedeemed) {
      check.Fail(who + " token not redeemed");
    }
  }
  check.Note(std::to_string(trace.sessions.size()) + " sessions");
  return check.Result();
}

InvariantResult BillingCorrectness(const Trace& trace) {
  Check check("billing-correctness");
  std::map<TokenId, const SessionRecord*> by_token;
  for (const SessionRecord& s : trace.sessions) by_token[s.token] = &s;
  for (const auto& record : trace.billing) {
    auto it = by_token.find(record.token_id);
    if (it == by_token.end()) {
      check.Fail("record for unknown token " + record.token_id.str());
      continue;
    }
    auto price = trace.prices.find(it->second->service_number);
    if (price == trace.prices.end()) {
      check.Fail("no price for service " + std::to_string(it->second->service_number));
      continue;
    }
    const std::int64_t expected = it->second->quantity * price->second;
    if (record.amount != expected) {
      check.Fail(record.token_id.str() + " billed " + std::to_string(record.amount) +
                 ", expected " + std::to_string(expected));
    }
  }
  return check.Result();
}

InvariantResult ExactlyOneBillingRecord(const Trace& trace) {
  Check check("exactly-one-billing-record");
  std::map<TokenId, std::size_t> counts;
  for (const auto& record : trace.billing) ++counts[record.token_id];
  for (const SessionRecord& s : trace.sessions) {
    std::size_t n = counts.contains(s.token) ? counts[s.token] : 0;
    if (n != 1) {
      check.Fail(s.session.str() + " has " + std::to_string(n) + " billing records");
    }
  }
  if (trace.billing.size() != trace.sessions.size()) {
    check.Fail(std::to_string(trace.billing.size()) + " records for " +
               std::to_string(trace.sessions.size()) + " sessions");
  }
  return check.Result();
}

InvariantResult MetadataOnlyRetention(const Trace& trace) {
  Check check("metadata-only-retention");
  static const std::set<SecretKind> kAllowed = {
      SecretKind::kTokenId, SecretKind::kAmount, SecretKind::kPaymentReference};
  static const std::set<std::string> kFields = {"token_id", "amount",
                                                "payment_reference", "timestamp"};
  const auto& secrets = trace.transcript.secrets;
  std::set<std::string> kinds;
  for (const simnet::StoreEntry& entry : trace.store) {
    if (!kFields.contains(entry.field)) check.Fail("stored field " + entry.field);
    if (auto kind = simnet::FieldKind(entry.field)) {
      for (const simnet::SecretRef* ref : secrets.Lookup(*kind, entry.value)) {
        kinds.insert(std::string(simnet::SecretKindName(ref->kind)));
        if (!kAllowed.contains(ref->kind)) {
          check.Fail("stored " + std::string(simnet::SecretKindName(ref->kind)));
        }
      }
    }
    // Untyped scan for longer secrets hiding in any stored value.
    for (const simnet::SecretRef& ref : secrets.all()) {
      if (kAllowed.contains(ref.kind) || ref.value.size() < 8) continue;
      if (entry.value.find(ref.value) != std::string::npos) {
        check.Fail("stored value contains a " +
                   std::string(simnet::SecretKindName(ref.kind)));
      }
    }
  }
  std::string found;
  for (const auto& kind : kinds) found += (found.empty() ? "" : ",") + kind;
  check.Note("store holds {" + found + "}");
  return check.Result();
}

InvariantResult TokenSingleUse(const Trace& trace) {
  Check check("token-single-use");
  std::vector<crypto::KeyPair> master_keys;
  if (trace.transcript.keys.Knows("master")) {
    master_keys = trace.transcript.keys.KeysOf("master");
  }
  std::map<std::string, std::size_t> attempts;
  for (const simnet::Envelope& e : trace.transcript.envelopes) {
    if (e.kind != simnet::BodyKind::kOnion || e.dead_letter) continue;
    crypto::OnionPacket packet;
    try {
      packet = crypto::DecodeOnion(e.body);
    } catch (const Error&) {
      continue;
    }
    for (const crypto::KeyPair& key : master_keys) {
      if (packet.outer.recipient_key_id != key.key_id) continue;
      try {
        crypto::PeelResult peeled = crypto::Peel(packet, key);
        if (!peeled.terminal()) continue;
        crypto::SealedBox box = crypto::DecodeSealedBox(peeled.payload);
        auto order = protocol::OrderFromMessage(DecodeMessage(crypto::Open(box, key)));
        ++attempts[order.token_id.str()];
      } catch (const Error&) {
      }
    }
  }
  for (const auto& [token, n] : attempts) {
    if (n > 1) {
      check.Fail("token " + token + " presented " + std::to_string(n) + " times");
    }
  }
  return check.Result();
}

InvariantResult AgentFinality(const Trace& trace) {
  Check check("agent-finality");
  auto killed = FirstEventTick(trace, "agent-killed");
  for (const simnet::Envelope& e : trace.transcript.envelopes) {
    if (e.from.str() != "manager") continue;
    auto it = killed.find(e.session);
    if (it != killed.end() && e.sent_at > it->second) {
      check.Fail("agent of " + e.session.str() + " sent at tick " +
                 std::to_string(e.sent_at) + " after its kill at " +
                 std::to_string(it->second));
    }
  }
  return check.Result();
}

InvariantResult TeardownFinality(const Trace& trace) {
  Check check("teardown-finality");
  auto teardown = FirstEventTick(trace, "customer-teardown");
  for (const simnet::Envelope& e : trace.transcript.envelopes) {
    auto it = teardown.find(e.session);
    if (it != teardown.end() && e.tick > it->second) {
      check.Fail(e.session.str() + " traffic at tick " + std::to_string(e.tick) +
                 " after teardown at " + std::to_string(it->second));
    }
  }
  return check.Result();
}

InvariantResult CircuitValidity(const Trace& trace) {
  Check check("circuit-validity");
  std::size_t circuits = 0;
  for (const ProbeRecord& e : trace.events) {
    if (e.name != "circuit-issued") continue;
    ++circuits;
    const auto colon = e.detail.find(':');
    const std::uint64_t number = std::stoull(e.detail.substr(0, colon));
    std::vector<std::string> hops;
    std::stringstream list(e.detail.substr(colon + 1));
    for (std::string hop; std::getline(list, hop, ',');) hops.push_back(hop);

    const EpochRecord* epoch = EpochNumbered(trace, number);
    if (epoch == nullptr) {
      check.Fail("circuit from unknown epoch " + std::to_string(number));
      continue;
    }
    if (hops.size() < 3 || hops.size() != trace.circuit_length) {
      check.Fail("circuit of length " + std::to_string(hops.size()));
    }
    if (std::set<std::string>(hops.begin(), hops.end()).size() != hops.size()) {
      check.Fail("circuit repeats a hop");
    }
    auto master = epoch->names.find(trace.master_id);
    if (master == epoch->names.end() || hops.empty() || hops.back() != master->second) {
      check.Fail("circuit does not end at the master node");
    }
    std::set<std::string> current;
    for (const auto& [id, name] : epoch->names) current.insert(name);
    for (const auto& hop : hops) {
      if (!current.contains(hop)) check.Fail(hop + " is not a current pseudonym");
    }
  }
  check.Note(std::to_string(circuits) + " circuits");
  return check.Result();
}

InvariantResult PseudonymUse(const Trace& trace) {
  Check check("pseudonym-use");
  for (const simnet::Envelope& e : trace.transcript.envelopes) {
    if (e.dead_letter) check.Fail("dead letter to " + e.to.str());
    const EpochRecord* epoch = EpochAt(trace, e.tick);
    std::set<std::string> current;
    if (epoch != nullptr) {
      for (const auto& [id, name] : epoch->names) current.insert(name);
    }
    for (const Address* address : {&e.from, &e.to}) {
      const std::string& a = address->str();
      if (std::find(std::begin(kFixedAddresses), std::end(kFixedAddresses), a) !=
              std::end(kFixedAddresses) ||
          a.starts_with("customer-")) {
        continue;
      }
      if (!current.contains(a)) {
        check.Fail(a + " used at tick " + std::to_string(e.tick) +
                   " is not a current pseudonym");
      }
    }
  }
  return check.Result();
}

InvariantResult EpochMonotonicity(const Trace& trace) {
  Check check("epoch-monotonicity");
  std::set<std::string> ever;
  for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
    const EpochRecord& epoch = trace.epochs[i];
    if (i > 0) {
      const EpochRecord& before = trace.epochs[i - 1];
      if (epoch.epoch != before.epoch + 1) check.Fail("epoch numbers skip or repeat");
      if (epoch.tick < before.tick) check.Fail("epoch ticks go backwards");
      std::set<std::string> a, b;
      for (const auto& [id, name] : before.names) a.insert(id);
      for (const auto& [id, name] : epoch.names) b.insert(id);
      if (a != b) check.Fail("rotation changed the node set");
    }
    std::set<std::string> names;
    for (const auto& [id, name] : epoch.names) {
      if (!names.insert(name).second) check.Fail("two nodes share " + name);
      if (!ever.insert(name).second && i > 0) check.Fail(name + " reused");
    }
  }
  check.Note(std::to_string(trace.epochs.size()) + " epochs");
  return check.Result();
}

InvariantResult MnStateDiscipline(const Trace& trace) {
  Check check("mn-state-discipline");
  std::map<SessionId, std::vector<std::string>> sequences;
  for (const ProbeRecord& e : trace.events) {
    if (e.name == "mn-state") sequences[e.session].push_back(e.detail);
  }
  for (const auto& [session, states] : sequences) {
    bool prefix = states.size() <= std::size(kMnStates);
    for (std::size_t i = 0; prefix && i < states.size(); ++i) {
      prefix = states[i] == kMnStates[i];
    }
    if (!prefix) check.Fail(session.str() + " states out of order");
  }
  return check.Result();
}

// Knowledge of every principal that holds keys, plus the observer.
std::map<std::string, simnet::KnowledgeSet> AllKnowledge(const Trace& trace) {
  std::map<std::string, simnet::KnowledgeSet> out;
  for (const std::string& principal : trace.transcript.keys.principals()) {
    out.emplace(principal, simnet::Knowledge(trace.transcript, principal));
  }
  return out;
}

InvariantResult TrueIdConfinement(
    const Trace& trace, const std::map<std::string, simnet::KnowledgeSet>& known) {
  Check check("true-id-confinement");
  std::set<std::string> ids(trace.slave_ids.begin(), trace.slave_ids.end());
  ids.insert(trace.master_id);
  for (const simnet::Envelope& e : trace.transcript.envelopes) {
    if (ids.contains(e.from.str()) || ids.contains(e.to.str())) {
      check.Fail("true id used as an address at tick " + std::to_string(e.tick));
    }
  }
  for (const auto& [principal, set] : known) {
    if (set.Has(SecretKind::kTrueId)) check.Fail(principal + " reads a true id");
  }
  return check.Result();
}

InvariantResult ObserverBlindness(
    const std::map<std::string, simnet::KnowledgeSet>& known) {
  Check check("observer-blindness");
  auto it = known.find(std::string(simnet::kObserver));
  if (it != known.end() && !it->second.refs.empty()) {
    check.Fail("observer reads " + std::to_string(it->second.refs.size()) + " secrets");
  }
  return check.Result();
}

InvariantResult SnCompartmentalization(
    const Trace& trace, const std::map<std::string, simnet::KnowledgeSet>& known) {
  Check check("sn-compartmentalization");
  for (const std::string& id : trace.slave_ids) {
    auto it = known.find(id);
    if (it == known.end()) continue;
    std::set<std::string> names;
    for (const EpochRecord& epoch : trace.epochs) {
      auto name = epoch.names.find(id);
      if (name != epoch.names.end()) names.insert(name->second);
    }
    std::set<std::string> own;
    for (const simnet::SecretRef& ref : trace.transcript.secrets.all()) {
      if (ref.kind == SecretKind::kSubPayload && names.contains(ref.owner)) {
        own.insert(ref.value);
      }
    }
    for (const simnet::SecretRef& ref : it->second.refs) {
      if (ref.kind == SecretKind::kPseudonym) continue;
      if (ref.kind == SecretKind::kSubPayload && own.contains(ref.value)) continue;
      check.Fail(id + " reads " + std::string(simnet::SecretKindName(ref.kind)));
    }
  }
  return check.Result();
}

}  // namespace

bool RunReport::passed() const {
  return std::all_of(invariants.begin(), invariants.end(),
                     [](const InvariantResult& r) { return r.pass; });
}

std::vector<std::string> RunReport::failing() const {
  std::vector<std::string> out;
  for (const auto& r : invariants) {
    if (!r.pass) out.push_back(r.name);
  }
  return out;
}

const InvariantResult* RunReport::Find(std::string_view name) const {
  for (const auto& r : invariants) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::vector<std::string> CoreInvariantNames() {
  return {"quiescence",        "session-completion",
          "billing-correctness", "exactly-one-billing-record",
          "metadata-only-retention", "token-single-use",
          "agent-finality",    "teardown-finality",
          "circuit-validity",  "pseudonym-use",
          "epoch-monotonicity", "mn-state-discipline",
          "true-id-confinement", "observer-blindness",
          "sn-compartmentalization"};
}

RunReport Analyze(const Trace& trace,
                  std::span<const simnet::AdversaryModel> extra) {
  RunReport report;
  report.seed = trace.seed;
  report.payment_mode = trace.payment_mode;
  report.invariants.push_back(Quiescence(trace));
  report.invariants.push_back(SessionCompletion(trace));
  report.invariants.push_back(BillingCorrectness(trace));
  report.invariants.push_back(ExactlyOneBillingRecord(trace));
  report.invariants.push_back(MetadataOnlyRetention(trace));
  report.invariants.push_back(TokenSingleUse(trace));
  report.invariants.push_back(AgentFinality(trace));
  report.invariants.push_back(TeardownFinality(trace));
  report.invariants.push_back(CircuitValidity(trace));
  report.invariants.push_back(PseudonymUse(trace));
  report.invariants.push_back(EpochMonotonicity(trace));
  report.invariants.push_back(MnStateDiscipline(trace));
  const auto known = AllKnowledge(trace);
  report.invariants.push_back(TrueIdConfinement(trace, known));
  report.invariants.push_back(ObserverBlindness(known));
  report.invariants.push_back(SnCompartmentalization(trace, known));

  std::set<simnet::AdversaryModel> models;
  for (const std::string& name : trace.adversaries) models.insert(simnet::ParseModel(name));
  models.insert(extra.begin(), extra.end());
  for (simnet::AdversaryModel model : models) {
    simnet::LinkageVerdict verdict = simnet::LinkageReport(
        trace.transcript, simnet::AdversaryFor(model), trace.store);
    Check check("linkage/" + std::string(simnet::ModelName(model)));
    if (!simnet::MeetsExpectation(model, verdict)) {
      check.Fail("verdict differs from the expected outcome");
    }
    report.invariants.push_back(check.Result());
    report.verdicts.push_back(std::move(verdict));
  }

  for (const auto& record : trace.billing) {
    ++report.billing.records;
    report.billing.total += record.amount;
  }
  return report;
}

std::string ReportJson(const RunReport& report) {
  using nlohmann::json;
  json j;
  j["schema_version"] = report.schema_version;
  j["transcript_path"] = report.transcript_path;
  j["seed"] = report.seed;
  j["payment_mode"] = report.payment_mode;
  j["passed"] = report.passed();
  json invariants = json::array();
  for (const auto& r : report.invariants) {
    invariants.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  j["invariants"] = invariants;
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    json customers = json::array();
    for (const auto& c : v.customers) {
      customers.push_back({{"customer", c.customer},
                           {"session", c.session.str()},
                           {"content_linked", c.content_linked},
                           {"sn_linked", c.sn_linked},
                           {"payment_linked", c.payment_linked}});
    }
    verdicts.push_back({{"adversary", v.adversary}, {"customers", customers}});
  }
  j["linkage"] = verdicts;
  j["billing"] = {{"records", report.billing.records},
                  {"total", report.billing.total}};
  return j.dump(2) + "\n";
}

RunOutcome RunScenario(const ScenarioConfig& config) {
  World world(config);
  world.Run();
  RunOutcome outcome;
  outcome.trace = world.Export();
  outcome.report = Analyze(outcome.trace);
  return outcome;
}

}  // namespace anoncloud::scenario
