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

#ifndef ANONCLOUD_DIRECTORY_SERVER_H_
#define ANONCLOUD_DIRECTORY_SERVER_H_

#include <cstdint>
#include <string>

#include "anoncloud/crypto.h"
#include "anoncloud/directory.h"
#include "anoncloud/prng.h"
#include "anoncloud/probe.h"
#include "anoncloud/simnet.h"

namespace anoncloud::directory {

// Network face of the directory: serves circuit requests from trust anchors
// and owns pseudonym rotation.
class DirectoryServer : public simnet::Actor {
 public:
  DirectoryServer(Directory& directory, crypto::KeyPair keys,
                  std::size_t circuit_length, Prng circuit_prng,
                  Prng rotation_prng, simnet::Probe probe = {});

  // Rotates every pseudonym, moves each node's network address to its new
  // name and tells the master node the new epoch.
  PseudonymMapping Rotate(simnet::Network& network);

  const crypto::PublicKey& public_key() const { return keys_.public_part; }

  void OnEnvelope(const simnet::Envelope& envelope,
                  simnet::Network& network) override;

 private:
  Directory& directory_;
  crypto::KeyPair keys_;
  std::size_t circuit_length_;
  Prng circuit_prng_;
  Prng rotation_prng_;
  simnet::Probe probe_;
};

}  // namespace anoncloud::directory

#endif  // ANONCLOUD_DIRECTORY_SERVER_H_
