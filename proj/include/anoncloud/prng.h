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

#ifndef ANONCLOUD_PRNG_H_
#define ANONCLOUD_PRNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace anoncloud {

// Seeded generator behind every random choice in the simulator: pseudonym
// names, hop selection, token and process identifiers.
//
// std::mt19937_64 has a fully specified output sequence; the standard
// distributions do not, so bounded draws are done here by rejection sampling
// to keep runs byte-identical across standard libraries.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Independent stream for a named subsystem. Does not advance this generator.
  static std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label);
  Prng Fork(std::string_view label) const {
    return Prng(DeriveSeed(seed_, label));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t Uniform(std::uint64_t bound);
  // Uniform in [lo, hi].
  std::int64_t Range(std::int64_t lo, std::int64_t hi);
  // `n_bytes` random bytes as lowercase hex.
  std::string Hex(std::size_t n_bytes);

  // First `k` elements of a Fisher-Yates shuffle of `items`, i.e. a uniform
  // sample without replacement in selection order.
  template <typename T>
  std::vector<T> Sample(std::vector<T> items, std::size_t k) {
    for (std::size_t i = 0; i < k && i < items.size(); ++i) {
      std::size_t j = i + static_cast<std::size_t>(Uniform(items.size() - i));
      std::swap(items[i], items[j]);
    }
    items.resize(std::min(k, items.size()));
    return items;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace anoncloud

#endif  // ANONCLOUD_PRNG_H_
