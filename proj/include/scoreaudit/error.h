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

#ifndef SCOREAUDIT_ERROR_H_
#define SCOREAUDIT_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scoreaudit {

enum class ErrorCode {
  kMalformedRow,
  kNonFiniteScore,
  kEmptyInput,
  kDuplicateSubject,
  kUnknownSubject,
  kMissingPair,
  kSubjectMismatch,
  kInvalidConfig,
  kEmptySequence,
  kDegenerateDistribution,
  kDegenerateMatrix,
  kNumericalFailure,
  kIoFailure,
};

// Coarse classes used for process exit codes.
enum class ErrorClass { kValidation, kNumerical, kIo };

std::string_view ErrorCodeName(ErrorCode code);
ErrorClass ClassOf(ErrorCode code);

// The single exception type thrown by the library. `line()` is set for
// parse errors (1-based, header is line 1).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::int64_t> line = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<std::int64_t> line() const { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::int64_t> line_;
};

}  // namespace scoreaudit

#endif  // SCOREAUDIT_ERROR_H_
