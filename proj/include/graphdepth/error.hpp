/* Copyright (c) 2026 The graphdepth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <stdexcept>
#include <string>

namespace graphdepth {

enum class ErrorCode {
  kInvalidArgument,
  kDegeneratePlaneRay,
  kZeroRho,
  kNonPositiveCalibration,
  kNonFiniteEnergy,
  kEmptyConfidence,
  kNoGroundTruth,
  kMalformedHeader,
  kTruncatedPayload,
  kUnsupportedChannelCount,
  kInvalidScene,
  kIo,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. The code identifies the failure class so callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by reading or writing files.
  bool is_io() const noexcept {
    return code_ == ErrorCode::kIo || code_ == ErrorCode::kMalformedHeader ||
           code_ == ErrorCode::kTruncatedPayload || code_ == ErrorCode::kUnsupportedChannelCount;
  }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegeneratePlaneRay: return "DegeneratePlaneRay";
    case ErrorCode::kZeroRho: return "ZeroRho";
    case ErrorCode::kNonPositiveCalibration: return "NonPositiveCalibration";
    case ErrorCode::kNonFiniteEnergy: return "NonFiniteEnergy";
    case ErrorCode::kEmptyConfidence: return "EmptyConfidence";
    case ErrorCode::kNoGroundTruth: return "NoGroundTruth";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kUnsupportedChannelCount: return "UnsupportedChannelCount";
    case ErrorCode::kInvalidScene: return "InvalidScene";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace graphdepth
