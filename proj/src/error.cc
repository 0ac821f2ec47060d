// Copyright 2026 The scoreaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scoreaudit/error.h"

namespace scoreaudit {
namespace {

std::string Compose(ErrorCode code, const std::string& message,
                    std::optional<std::int64_t> line) {
  std::string out(ErrorCodeName(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDuplicateSubject: return "DuplicateSubject";
    case ErrorCode::kUnknownSubject: return "UnknownSubject";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kSubjectMismatch: return "SubjectMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kDegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

ErrorClass ClassOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySequence:
    case ErrorCode::kDegenerateDistribution:
    case ErrorCode::kDegenerateMatrix:
    case ErrorCode::kNumericalFailure:
      return ErrorClass::kNumerical;
    case ErrorCode::kIoFailure:
      return ErrorClass::kIo;
    default:
      return ErrorClass::kValidation;
  }
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::int64_t> line)
    : std::runtime_error(Compose(code, message, line)),
      code_(code),
      line_(line) {}

}  // namespace scoreaudit
