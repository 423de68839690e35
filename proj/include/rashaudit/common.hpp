/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace rashaudit {

inline constexpr const char* kVersion = "0.1.0";

/// Every failure mode has a stable identity so callers (and tests) can
/// dispatch on it instead of parsing messages.
enum class ErrorCode {
  kFileNotFound,
  kMalformedCsv,
  kNotBinaryTarget,
  kEmptyAfterCleaning,
  kClassTooSmall,
  kNameMismatch,
  kMinorityTooSmall,
  kDegenerateData,
  kDimensionMismatch,
  kSingleClass,
  kEmptyPool,
  kEmptySpace,
  kLengthMismatch,
  kAllTied,
  kDegenerateGroups,
  kIncompleteDesign,
  kUnknownMetric,
  kEmptyTable,
  kIoError,
  kSchemaViolation,
  kInvalidArgument,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kNotBinaryTarget: return "NotBinaryTarget";
    case ErrorCode::kEmptyAfterCleaning: return "EmptyAfterCleaning";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kNameMismatch: return "NameMismatch";
    case ErrorCode::kMinorityTooSmall: return "MinorityTooSmall";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kEmptySpace: return "EmptySpace";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAllTied: return "AllTied";
    case ErrorCode::kDegenerateGroups: return "DegenerateGroups";
    case ErrorCode::kIncompleteDesign: return "IncompleteDesign";
    case ErrorCode::kUnknownMetric: return "UnknownMetric";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rashaudit
