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

#ifndef ANONCLOUD_IDS_H_
#define ANONCLOUD_IDS_H_

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <utility>

namespace anoncloud {

// String-backed identifier that only compares with identifiers of the same
// tag, so a pseudonym can never be passed where a true id is expected.
template <typename Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Id& id) {
    return os << id.value_;
  }

 private:
  std::string value_;
};

using KeyId = Id<struct KeyIdTag>;
using TrueId = Id<struct TrueIdTag>;
using Pseudonym = Id<struct PseudonymTag>;
using TokenId = Id<struct TokenIdTag>;
using ProcessId = Id<struct ProcessIdTag>;
using SessionId = Id<struct SessionIdTag>;
using PaymentHandle = Id<struct PaymentHandleTag>;
using PaymentReference = Id<struct PaymentReferenceTag>;
// Network address of an actor. Slave and master nodes are addressed by their
// current pseudonym; fixed roles use well-known names.
using Address = Id<struct AddressTag>;

}  // namespace anoncloud

template <typename Tag>
struct std::hash<anoncloud::Id<Tag>> {
  std::size_t operator()(const anoncloud::Id<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

#endif  // ANONCLOUD_IDS_H_
