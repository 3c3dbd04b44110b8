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

#include "anoncloud/config.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "anoncloud/error.h"
#include "anoncloud/job.h"

namespace anoncloud::scenario {

namespace {

[[noreturn]] void Fail(const YAML::Node& node, const std::string& what) {
  const YAML::Mark mark = node.Mark();
  std::string where =
      mark.is_null() ? "" : "line " + std::to_string(mark.line + 1) + ": ";
  throw Error(ErrorCode::kConfig, where + what);
}

template <typename T>
T As(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    Fail(node, field + " has the wrong type");
  }
}

std::size_t Count(const YAML::Node& node, const std::string& field) {
  auto value = As<long long>(node, field);
  if (value < 0) Fail(node, field + " must not be negative");
  return static_cast<std::size_t>(value);
}

void CheckKeys(const YAML::Node& map, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!map.IsMap()) Fail(map, where + " must be a mapping");
  for (const auto& item : map) {
    auto key = item.first.as<std::string>();
    if (!allowed.contains(key)) Fail(item.first, "unknown field " + where + "." + key);
  }
}

RequestSpec ParseRequest(const YAML::Node& node) {
  CheckKeys(node, {"customer", "service_number", "quantity", "job"}, "request");
  RequestSpec spec;
  if (!node["customer"] || !node["job"]) {
    Fail(node, "request needs customer and job");
  }
  spec.customer = As<std::string>(node["customer"], "request.customer");
  if (spec.customer.empty()) Fail(node["customer"], "request.customer is empty");
  if (node["service_number"]) {
    spec.service_number = As<std::int64_t>(node["service_number"], "request.service_number");
  }
  if (node["quantity"]) {
    spec.quantity = As<std::int64_t>(node["quantity"], "request.quantity");
    if (spec.quantity < 0) Fail(node["quantity"], "request.quantity must not be negative");
  }
  spec.job = As<std::string>(node["job"], "request.job");
  try {
    compute::ParseJob(spec.job);
  } catch (const Error& e) {
    Fail(node["job"], std::string("request.job: ") + e.what());
  }
  return spec;
}

Event ParseEvent(const YAML::Node& node) {
  Event event;
  if (node.IsScalar()) {
    auto name = node.as<std::string>();
    if (name == "rotate") {
      event.kind = EventKind::kRotate;
      return event;
    }
    if (name == "inject_replay") {
      event.kind = EventKind::kInjectReplay;
      return event;
    }
    Fail(node, "unknown event " + name);
  }
  if (!node.IsMap() || node.size() != 1) {
    Fail(node, "each event is a single-key mapping");
  }
  const auto name = node.begin()->first.as<std::string>();
  const YAML::Node body = node.begin()->second;
  if (name == "request") {
    event.kind = EventKind::kRequest;
    event.requests.push_back(ParseRequest(body));
  } else if (name == "batch") {
    event.kind = EventKind::kBatch;
    if (!body.IsSequence() || body.size() == 0) {
      Fail(body, "batch must be a non-empty list of requests");
    }
    for (const auto& item : body) event.requests.push_back(ParseRequest(item));
  } else if (name == "rotate") {
    event.kind = EventKind::kRotate;
  } else if (name == "inject_replay") {
    event.kind = EventKind::kInjectReplay;
  } else if (name == "adversary") {
    event.kind = EventKind::kAdversary;
    try {
      event.adversary = simnet::ParseModel(As<std::string>(body, "adversary"));
    } catch (const Error& e) {
      Fail(body, e.what());
    }
  } else if (name == "random_requests") {
    event.kind = EventKind::kRandomRequests;
    CheckKeys(body, {"count", "max_items"}, "random_requests");
    if (!body["count"]) Fail(body, "random_requests needs count");
    event.count = Count(body["count"], "random_requests.count");
    if (body["max_items"]) {
      event.max_items = Count(body["max_items"], "random_requests.max_items");
      if (event.max_items == 0) Fail(body["max_items"], "random_requests.max_items must be at least 1");
    }
  } else {
    Fail(node, "unknown event " + name);
  }
  return event;
}

}  // namespace

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kRequest: return "request";
    case EventKind::kBatch: return "batch";
    case EventKind::kRotate: return "rotate";
    case EventKind::kAdversary: return "adversary";
    case EventKind::kRandomRequests: return "random_requests";
    case EventKind::kInjectReplay: return "inject_replay";
  }
  return "?";
}

void Validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfig, what);
  };
  if (c.schema_version != kConfigSchemaVersion) {
    fail("schema_version " + std::to_string(c.schema_version) +
         " is not supported (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  if (c.circuit_length < directory::kDefaultMinCircuitLength) {
    fail("circuit.length: circuits need at least " +
         std::to_string(directory::kDefaultMinCircuitLength) +
         " layers, got " + std::to_string(c.circuit_length));
  }
  if (c.slave_nodes + 1 < c.circuit_length) {
    fail("nodes.slave_nodes: capacity rule needs at least circuit.length - 1 = " +
         std::to_string(c.circuit_length - 1) + " slave nodes, got " +
         std::to_string(c.slave_nodes));
  }
  if (c.parts > c.circuit_length - 1) {
    fail("circuit.parts: at most circuit.length - 1 sub-services per job");
  }
  const std::pair<const char*, std::size_t> singletons[] = {
      {"nodes.master_nodes", c.master_nodes},
      {"nodes.directory_servers", c.directory_servers},
      {"nodes.managers", c.managers},
      {"nodes.banks", c.banks}};
  for (const auto& [field, count] : singletons) {
    if (count != 1) {
      fail(std::string(field) + ": exactly one is required, got " +
           std::to_string(count));
    }
  }
  if (c.step_budget == 0) fail("step_budget must be positive");
  if (c.catalog.empty()) fail("catalog: at least one service is required");
  std::set<std::int64_t> numbers;
  for (const CatalogItem& item : c.catalog) {
    if (!numbers.insert(item.service_number).second) {
      fail("catalog: service_number " + std::to_string(item.service_number) +
           " listed twice");
    }
    if (item.unit_price < 0) {
      fail("catalog: unit_price of service " +
           std::to_string(item.service_number) + " is negative");
    }
  }
  for (const Event& event : c.events) {
    for (const RequestSpec& request : event.requests) {
      if (!numbers.contains(request.service_number)) {
        fail("events: request for unknown service_number " +
             std::to_string(request.service_number));
      }
    }
  }
}

ScenarioConfig ParseConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::kConfig, "line " + std::to_string(e.mark.line + 1) +
                                        ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::kConfig, "config must be a mapping");
  CheckKeys(root,
            {"schema_version", "seed", "nodes", "circuit", "catalog",
             "payment_mode", "adversaries", "events", "step_budget",
             "trust_anchors"},
            "config");

  ScenarioConfig c;
  if (!root["schema_version"]) {
    throw Error(ErrorCode::kConfig, "schema_version is required");
  }
  c.schema_version = As<int>(root["schema_version"], "schema_version");
  if (root["seed"]) c.seed = As<std::uint64_t>(root["seed"], "seed");

  if (const YAML::Node nodes = root["nodes"]) {
    CheckKeys(nodes,
              {"slave_nodes", "master_nodes", "directory_servers", "managers", "banks"},
              "nodes");
    if (nodes["slave_nodes"]) c.slave_nodes = Count(nodes["slave_nodes"], "nodes.slave_nodes");
    if (nodes["master_nodes"]) c.master_nodes = Count(nodes["master_nodes"], "nodes.master_nodes");
    if (nodes["directory_servers"]) {
      c.directory_servers = Count(nodes["directory_servers"], "nodes.directory_servers");
    }
    if (nodes["managers"]) c.managers = Count(nodes["managers"], "nodes.managers");
    if (nodes["banks"]) c.banks = Count(nodes["banks"], "nodes.banks");
  }
  if (const YAML::Node circuit = root["circuit"]) {
    CheckKeys(circuit, {"length", "parts"}, "circuit");
    if (circuit["length"]) c.circuit_length = Count(circuit["length"], "circuit.length");
    if (circuit["parts"]) c.parts = Count(circuit["parts"], "circuit.parts");
  }
  if (const YAML::Node catalog = root["catalog"]) {
    if (!catalog.IsSequence()) Fail(catalog, "catalog must be a list");
    for (const auto& item : catalog) {
      CheckKeys(item, {"service_number", "type", "unit_price"}, "catalog");
      if (!item["service_number"] || !item["unit_price"]) {
        Fail(item, "catalog entries need service_number and unit_price");
      }
      CatalogItem entry;
      entry.service_number = As<std::int64_t>(item["service_number"], "catalog.service_number");
      entry.type = item["type"] ? As<std::string>(item["type"], "catalog.type") : "";
      entry.unit_price = As<std::int64_t>(item["unit_price"], "catalog.unit_price");
      if (entry.unit_price < 0) Fail(item["unit_price"], "catalog.unit_price is negative");
      c.catalog.push_back(std::move(entry));
    }
  }
  if (const YAML::Node mode = root["payment_mode"]) {
    try {
      c.payment_mode = manager::ParsePaymentMode(As<std::string>(mode, "payment_mode"));
    } catch (const Error& e) {
      Fail(mode, e.what());
    }
  }
  if (const YAML::Node models = root["adversaries"]) {
    if (!models.IsSequence()) Fail(models, "adversaries must be a list");
    for (const auto& item : models) {
      try {
        c.adversaries.push_back(simnet::ParseModel(As<std::string>(item, "adversaries")));
      } catch (const Error& e) {
        Fail(item, e.what());
      }
    }
  }
  if (const YAML::Node budget = root["step_budget"]) {
    c.step_budget = Count(budget, "step_budget");
  }
  if (const YAML::Node anchors = root["trust_anchors"]) {
    if (!anchors.IsSequence()) Fail(anchors, "trust_anchors must be a list");
    c.trust_anchors.clear();
    for (const auto& item : anchors) {
      c.trust_anchors.insert(As<std::string>(item, "trust_anchors"));
    }
  }
  if (const YAML::Node events = root["events"]) {
    if (!events.IsSequence()) Fail(events, "events must be a list");
    for (const auto& item : events) c.events.push_back(ParseEvent(item));
  }
  Validate(c);
  return c;
}

ScenarioConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

ScenarioConfig CanonicalConfig() {
  ScenarioConfig c;
  c.seed = 20260101;
  c.slave_nodes = 3;
  c.catalog = {{1, "summation", 5}};
  c.adversaries = simnet::AllModels();
  Event request;
  request.kind = EventKind::kRequest;
  request.requests.push_back({"alice", 1, 1, "sum[1,2,3,4]"});
  c.events.push_back(std::move(request));
  return c;
}

}  // namespace anoncloud::scenario
