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

#include "anoncloud/trace.h"

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "anoncloud/error.h"

namespace anoncloud::scenario {

using nlohmann::json;

namespace {

json Line(std::string_view type) { return json{{"type", type}}; }

std::string Hex(const Bytes& bytes) { return HexEncode(bytes); }

}  // namespace

void WriteTrace(const Trace& trace, std::ostream& out) {
  std::size_t lines = 0;
  auto emit = [&](const json& j) {
    out << j.dump() << '\n';
    ++lines;
  };

  json header = Line("header");
  header["schema_version"] = trace.schema_version;
  header["seed"] = trace.seed;
  header["payment_mode"] = trace.payment_mode;
  header["circuit_length"] = trace.circuit_length;
  header["master_id"] = trace.master_id;
  header["slave_ids"] = trace.slave_ids;
  header["adversaries"] = trace.adversaries;
  json prices = json::array();
  for (const auto& [number, price] : trace.prices) prices.push_back({number, price});
  header["prices"] = prices;
  if (trace.livelock) header["livelock"] = *trace.livelock;
  emit(header);

  for (const auto& key : trace.transcript.keys.records()) {
    json j = Line("key");
    j["principal"] = key.principal;
    j["seed"] = key.seed;
    j["persistent"] = key.persistent;
    j["session"] = key.session.str();
    emit(j);
  }
  for (const auto& ref : trace.transcript.secrets.all()) {
    json j = Line("secret");
    j["kind"] = simnet::SecretKindName(ref.kind);
    j["value"] = ref.value;
    j["session"] = ref.session.str();
    j["owner"] = ref.owner;
    emit(j);
  }
  for (const auto& e : trace.transcript.envelopes) {
    json j = Line("envelope");
    j["tick"] = e.tick;
    j["sent_at"] = e.sent_at;
    j["from"] = e.from.str();
    j["to"] = e.to.str();
    j["kind"] = simnet::BodyKindName(e.kind);
    j["size"] = e.body.size();
    j["session_id"] = e.session.str();
    j["link"] = e.link;
    j["dead_letter"] = e.dead_letter;
    j["body"] = Hex(e.body);
    emit(j);
  }
  for (const auto& e : trace.events) {
    json j = Line("event");
    j["tick"] = e.tick;
    j["name"] = e.name;
    j["session"] = e.session.str();
    j["detail"] = e.detail;
    emit(j);
  }
  for (const auto& s : trace.sessions) {
    json j = Line("session");
    j["customer"] = s.customer;
    j["session"] = s.session.str();
    j["token"] = s.token.str();
    j["service_number"] = s.service_number;
    j["quantity"] = s.quantity;
    j["job"] = s.job;
    if (s.result) j["result"] = *s.result;
    j["torn_down"] = s.torn_down;
    emit(j);
  }
  for (const auto& epoch : trace.epochs) {
    json j = Line("epoch");
    j["epoch"] = epoch.epoch;
    j["tick"] = epoch.tick;
    j["names"] = epoch.names;
    emit(j);
  }
  for (const auto& entry : trace.store) {
    json j = Line("store");
    j["record"] = entry.record;
    j["field"] = entry.field;
    j["value"] = entry.value;
    emit(j);
  }
  for (const auto& record : trace.billing) {
    json j = Line("billing");
    j["token_id"] = record.token_id.str();
    j["amount"] = record.amount;
    j["payment_reference"] = record.payment_reference.str();
    j["timestamp"] = record.timestamp;
    emit(j);
  }
  for (const auto& token : trace.tokens) {
    json j = Line("token");
    j["token_id"] = token.token_id.str();
    j["service_number"] = token.service_number;
    j["state"] = manager::TokenStateName(token.state);
    emit(j);
  }
  json end = Line("end");
  end["lines"] = lines;
  out << end.dump() << '\n';
}

std::string TraceText(const Trace& trace) {
  std::ostringstream out;
  WriteTrace(trace, out);
  return out.str();
}

namespace {

manager::TokenState ParseTokenState(const std::string& name) {
  for (auto state : {manager::TokenState::kIssued, manager::TokenState::kRedeemed,
                     manager::TokenState::kExpired}) {
    if (manager::TokenStateName(state) == name) return state;
  }
  throw Error(ErrorCode::kSchema, "unknown token state " + name);
}

}  // namespace

Trace ReadTrace(std::istream& in) {
  Trace trace;
  std::string text;
  std::size_t lines = 0;
  bool saw_header = false;
  bool saw_end = false;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    if (saw_end) throw Error(ErrorCode::kSchema, "records after the end record");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(lines + 1) + ": " + e.what());
    }
    try {
      const std::string type = j.at("type");
      if (!saw_header && type != "header") {
        throw Error(ErrorCode::kSchema, "trace does not start with a header");
      }
      if (type == "header") {
        if (saw_header) throw Error(ErrorCode::kSchema, "second header");
        saw_header = true;
        trace.schema_version = j.at("schema_version");
        if (trace.schema_version != kTraceSchemaVersion) {
          throw Error(ErrorCode::kSchema,
                      "trace schema_version " + std::to_string(trace.schema_version) +
                          " is not supported (expected " +
                          std::to_string(kTraceSchemaVersion) + ")");
        }
        trace.seed = j.at("seed");
        trace.payment_mode = j.at("payment_mode");
        trace.circuit_length = j.at("circuit_length");
        trace.master_id = j.at("master_id");
        trace.slave_ids = j.at("slave_ids").get<std::vector<std::string>>();
        trace.adversaries = j.at("adversaries").get<std::vector<std::string>>();
        for (const auto& pair : j.at("prices")) {
          trace.prices[pair.at(0)] = pair.at(1);
        }
        if (j.contains("livelock")) trace.livelock = j.at("livelock").get<std::string>();
        trace.transcript.keys.AddPrincipal(std::string(simnet::kObserver));
      } else if (type == "key") {
        trace.transcript.keys.Add(j.at("principal"), j.at("seed"),
                                  j.at("persistent"),
                                  SessionId(j.at("session").get<std::string>()));
      } else if (type == "secret") {
        trace.transcript.secrets.Add(
            {simnet::ParseSecretKind(j.at("kind").get<std::string>()),
             j.at("value"), SessionId(j.at("session").get<std::string>()),
             j.at("owner")});
      } else if (type == "envelope") {
        simnet::Envelope e;
        e.tick = j.at("tick");
        e.sent_at = j.at("sent_at");
        e.from = Address(j.at("from").get<std::string>());
        e.to = Address(j.at("to").get<std::string>());
        e.kind = simnet::ParseBodyKind(j.at("kind").get<std::string>());
        e.session = SessionId(j.at("session_id").get<std::string>());
        e.link = j.at("link");
        e.dead_letter = j.at("dead_letter");
        e.body = HexDecode(j.at("body").get<std::string>());
        if (e.body.size() != j.at("size").get<std::size_t>()) {
          throw Error(ErrorCode::kSchema, "envelope size does not match body");
        }
        trace.transcript.envelopes.push_back(std::move(e));
      } else if (type == "event") {
        trace.events.push_back({j.at("tick"), j.at("name"),
                                SessionId(j.at("session").get<std::string>()),
                                j.at("detail")});
      } else if (type == "session") {
        SessionRecord s;
        s.customer = j.at("customer");
        s.session = SessionId(j.at("session").get<std::string>());
        s.token = TokenId(j.at("token").get<std::string>());
        s.service_number = j.at("service_number");
        s.quantity = j.at("quantity");
        s.job = j.at("job");
        if (j.contains("result")) s.result = j.at("result").get<std::string>();
        s.torn_down = j.at("torn_down");
        trace.sessions.push_back(std::move(s));
      } else if (type == "epoch") {
        trace.epochs.push_back(
            {j.at("epoch"), j.at("tick"),
             j.at("names").get<std::map<std::string, std::string>>()});
      } else if (type == "store") {
        trace.store.push_back({j.at("record"), j.at("field"), j.at("value")});
      } else if (type == "billing") {
        trace.billing.push_back(
            {TokenId(j.at("token_id").get<std::string>()), j.at("amount"),
             PaymentReference(j.at("payment_reference").get<std::string>()),
             j.at("timestamp")});
      } else if (type == "token") {
        trace.tokens.push_back({TokenId(j.at("token_id").get<std::string>()),
                                j.at("service_number"),
                                ParseTokenState(j.at("state"))});
      } else if (type == "end") {
        if (j.at("lines").get<std::size_t>() != lines) {
          throw Error(ErrorCode::kSchema, "end record counts " +
                                              j.at("lines").dump() + " lines, read " +
                                              std::to_string(lines));
        }
        saw_end = true;
        continue;
      } else {
        throw Error(ErrorCode::kSchema, "unknown record type " + type);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(lines + 1) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSchema) throw;
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(lines + 1) + ": " + e.what());
    }
    ++lines;
  }
  if (!saw_header) throw Error(ErrorCode::kSchema, "empty trace");
  if (!saw_end) throw Error(ErrorCode::kSchema, "trace is truncated: no end record");
  return trace;
}

}  // namespace anoncloud::scenario
