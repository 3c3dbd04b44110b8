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

#include "anoncloud/error.h"

namespace anoncloud {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPrecondition: return "Precondition";
    case ErrorCode::kWrongRecipient: return "WrongRecipient";
    case ErrorCode::kCorrupt: return "Corrupt";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kEmptyRoute: return "EmptyRoute";
    case ErrorCode::kDuplicateRegistration: return "DuplicateRegistration";
    case ErrorCode::kCapacity: return "CapacityError";
    case ErrorCode::kAccessDenied: return "AccessDenied";
    case ErrorCode::kUnknownService: return "UnknownService";
    case ErrorCode::kDeadAgent: return "DeadAgent";
    case ErrorCode::kTokenReplay: return "TokenReplay";
    case ErrorCode::kUnknownPayment: return "UnknownPayment";
    case ErrorCode::kStaleCircuit: return "StaleCircuit";
    case ErrorCode::kSubJobError: return "SubJobError";
    case ErrorCode::kEvalError: return "EvalError";
    case ErrorCode::kRoutingError: return "RoutingError";
    case ErrorCode::kNotReady: return "NotReady";
    case ErrorCode::kLivelockSuspected: return "LivelockSuspected";
    case ErrorCode::kUnknownPrincipal: return "UnknownPrincipal";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kSchema: return "SchemaError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message),
      code_(code) {}

}  // namespace anoncloud
