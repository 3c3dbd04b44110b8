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

#ifndef ANONCLOUD_BYTES_H_
#define ANONCLOUD_BYTES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anoncloud {

using Bytes = std::vector<std::uint8_t>;

Bytes ToBytes(std::string_view text);
std::string ToString(std::span<const std::uint8_t> bytes);

std::string HexEncode(std::span<const std::uint8_t> bytes);
// Throws Error(kCorrupt) on odd length or non-hex characters.
Bytes HexDecode(std::string_view hex);

// True when `needle` occurs anywhere inside `haystack`.
bool Contains(std::span<const std::uint8_t> haystack, std::string_view needle);

// Big-endian, length-prefixed encoder used by every wire format.
class ByteWriter {
 public:
  void U8(std::uint8_t v);
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void Raw(std::span<const std::uint8_t> data);
  // u16 length followed by the bytes.
  void ShortString(std::string_view s);
  // u32 length followed by the bytes.
  void Blob(std::span<const std::uint8_t> data);

  Bytes Take() && { return std::move(out_); }
  const Bytes& bytes() const { return out_; }

 private:
  Bytes out_;
};

// Reader counterpart; every accessor throws Error(kCorrupt) on underrun.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t U8();
  std::uint16_t U16();
  std::uint32_t U32();
  std::uint64_t U64();
  std::span<const std::uint8_t> Raw(std::size_t n);
  std::string ShortString();
  Bytes Blob();

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  // Throws Error(kCorrupt) if bytes are left over.
  void ExpectEnd() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace anoncloud

#endif  // ANONCLOUD_BYTES_H_
