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

#include "anoncloud/message.h"

#include <charconv>

#include "anoncloud/error.h"

namespace anoncloud {

Message& Message::Set(std::string_view name, std::string_view value) {
  return SetBytes(name, ToBytes(value));
}

Message& Message::SetBytes(std::string_view name, Bytes value) {
  fields.emplace_back(std::string(name), std::move(value));
  return *this;
}

Message& Message::SetInt(std::string_view name, std::int64_t value) {
  return Set(name, std::to_string(value));
}

const Bytes* Message::Find(std::string_view name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return &value;
  }
  return nullptr;
}

const Bytes& Message::GetBytes(std::string_view name) const {
  const Bytes* value = Find(name);
  if (value == nullptr) {
    throw Error(ErrorCode::kCorrupt,
                kind + " message lacks field " + std::string(name));
  }
  return *value;
}

std::string Message::Get(std::string_view name) const {
  return ToString(GetBytes(name));
}

std::int64_t Message::GetInt(std::string_view name) const {
  std::string text = Get(name);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kCorrupt, "field " + std::string(name) +
                                         " is not an integer: " + text);
  }
  return value;
}

Bytes EncodeMessage(const Message& message) {
  ByteWriter w;
  w.U8(kMessageTag);
  w.ShortString(message.kind);
  w.U16(static_cast<std::uint16_t>(message.fields.size()));
  for (const auto& [key, value] : message.fields) {
    w.ShortString(key);
    w.Blob(value);
  }
  return std::move(w).Take();
}

Message DecodeMessage(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  if (r.U8() != kMessageTag) throw Error(ErrorCode::kCorrupt, "not a message");
  Message message(r.ShortString());
  std::uint16_t n = r.U16();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::string key = r.ShortString();
    message.fields.emplace_back(std::move(key), r.Blob());
  }
  r.ExpectEnd();
  return message;
}

}  // namespace anoncloud
