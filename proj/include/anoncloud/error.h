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

#ifndef ANONCLOUD_ERROR_H_
#define ANONCLOUD_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace anoncloud {

// Every failure the library reports carries one of these codes so callers
// and tests can match on the category rather than the message text.
enum class ErrorCode {
  kPrecondition,
  kWrongRecipient,
  kCorrupt,
  kDuplicateKey,
  kEmptyRoute,
  kDuplicateRegistration,
  kCapacity,
  kAccessDenied,
  kUnknownService,
  kDeadAgent,
  kTokenReplay,
  kUnknownPayment,
  kStaleCircuit,
  kSubJobError,
  kEvalError,
  kRoutingError,
  kNotReady,
  kLivelockSuspected,
  kUnknownPrincipal,
  kUnknownSession,
  kConfig,
  kSchema,
};

std::string_view ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace anoncloud

#endif  // ANONCLOUD_ERROR_H_
