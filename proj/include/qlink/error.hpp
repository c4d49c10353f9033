// Copyright 2026 The qlink Authors
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
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qlink {

/// Stable validation codes. The numeric values travel on the wire and must
/// never be renumbered; append new codes at the end.
enum class ErrorCode : std::int32_t {
    Ok = 0,
    QubitIndexOutOfRange = 1,
    DuplicateQubit = 2,
    InvalidArity = 3,
    NonUnitaryMatrix = 4,
    NonCptpKraus = 5,
    ProbabilityOutOfRange = 6,
    ChannelOnStateVector = 7,
    DimensionMismatch = 8,
    UnknownQureg = 9,
    UnnormalizedState = 10,
    UnphysicalDensityMatrix = 11,
    InvalidQubitCount = 12,
    IndexOutOfRange = 13,
    ResourceExhausted = 14,
    Unsupported = 15,
    SyntaxError = 16,
    MalformedMessage = 17,
    VersionMismatch = 18,
    InvalidArgument = 19,
    SolverFailure = 20,
};

inline std::string_view errorCodeName(ErrorCode code) {
    switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::QubitIndexOutOfRange: return "qubit-index-out-of-range";
    case ErrorCode::DuplicateQubit: return "duplicate-qubit";
    case ErrorCode::InvalidArity: return "invalid-arity";
    case ErrorCode::NonUnitaryMatrix: return "non-unitary-matrix";
    case ErrorCode::NonCptpKraus: return "non-cptp-kraus";
    case ErrorCode::ProbabilityOutOfRange: return "probability-out-of-range";
    case ErrorCode::ChannelOnStateVector: return "channel-on-state-vector";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::UnknownQureg: return "unknown-qureg";
    case ErrorCode::UnnormalizedState: return "unnormalized-state";
    case ErrorCode::UnphysicalDensityMatrix: return "unphysical-density-matrix";
    case ErrorCode::InvalidQubitCount: return "invalid-qubit-count";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::ResourceExhausted: return "resource-exhausted";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::MalformedMessage: return "malformed-message";
    case ErrorCode::VersionMismatch: return "version-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SolverFailure: return "solver-failure";
    }
    return "unknown";
}

/// A single validation finding. `gateIndex` is -1 when the problem is not
/// tied to a particular gate of a circuit.
struct ValidationError {
    ErrorCode code = ErrorCode::Ok;
    std::string message;
    std::int64_t gateIndex = -1;

    friend bool operator==(const ValidationError &, const ValidationError &) = default;
};

/// Thrown for every user-input problem detected by the library, locally or
/// reported back by a remote server.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message, std::int64_t gateIndex = -1)
        : std::runtime_error(format(code, message, gateIndex)), error_{code, message, gateIndex} {}

    explicit Error(ValidationError error)
        : std::runtime_error(format(error.code, error.message, error.gateIndex)),
          error_(std::move(error)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return error_.code; }
    [[nodiscard]] std::int64_t gateIndex() const noexcept { return error_.gateIndex; }
    [[nodiscard]] const std::string &detail() const noexcept { return error_.message; }
    [[nodiscard]] const ValidationError &validation() const noexcept { return error_; }

  private:
    static std::string format(ErrorCode code, const std::string &message, std::int64_t gateIndex) {
        std::string out(errorCodeName(code));
        if (gateIndex >= 0) {
            out += " at gate " + std::to_string(gateIndex);
        }
        out += ": " + message;
        return out;
    }

    ValidationError error_;
};

/// Connection-level failure talking to a remote environment. Distinct from
/// `Error` so callers can tell a dropped link from a rejected request.
class TransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qlink
