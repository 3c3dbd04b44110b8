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

#ifndef ANONCLOUD_MESSAGE_H_
#define ANONCLOUD_MESSAGE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anoncloud/bytes.h"

namespace anoncloud {

// Application-level record carried inside sealed boxes: a kind plus ordered
// named fields. Field names are part of the protocol; the knowledge analysis
// keys its secret lookup on them.
struct Message {
  std::string kind;
  std::vector<std::pair<std::string, Bytes>> fields;

  Message() = default;
  explicit Message(std::string k) : kind(std::move(k)) {}

  Message& Set(std::string_view name, std::string_view value);
  Message& SetBytes(std::string_view name, Bytes value);
  Message& SetInt(std::string_view name, std::int64_t value);

  bool Has(std::string_view name) const { return Find(name) != nullptr; }
  const Bytes* Find(std::string_view name) const;
  // Throw Error(kCorrupt) when the field is missing or malformed.
  const Bytes& GetBytes(std::string_view name) const;
  std::string Get(std::string_view name) const;
  std::int64_t GetInt(std::string_view name) const;
};

inline constexpr std::uint8_t kMessageTag = 'M';

Bytes EncodeMessage(const Message& message);
Message DecodeMessage(std::span<const std::uint8_t> data);

}  // namespace anoncloud

#endif  // ANONCLOUD_MESSAGE_H_
