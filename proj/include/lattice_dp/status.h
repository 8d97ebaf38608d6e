//
// Copyright 2026 The lattice-dp Authors.
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
//

#ifndef LATTICE_DP_STATUS_H_
#define LATTICE_DP_STATUS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lattice_dp {

enum class ErrorCode {
  kRankDeficient,
  kEmptyLattice,
  kNotUnimodular,
  kInvalidArgument,
  kParameterDomain,
  kConfigInvalid,
  kParseError,
  kNegativePopulation,
  kNumericOverflow,
  kMeetingTimeout,
  kInsufficientChains,
  kCouplingRejectionCap,
  kIoError,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRankDeficient:
      return "RankDeficient";
    case ErrorCode::kEmptyLattice:
      return "EmptyLattice";
    case ErrorCode::kNotUnimodular:
      return "NotUnimodular";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kParameterDomain:
      return "ParameterDomain";
    case ErrorCode::kConfigInvalid:
      return "ConfigInvalid";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kNegativePopulation:
      return "NegativePopulation";
    case ErrorCode::kNumericOverflow:
      return "NumericOverflow";
    case ErrorCode::kMeetingTimeout:
      return "MeetingTimeout";
    case ErrorCode::kInsufficientChains:
      return "InsufficientChains";
    case ErrorCode::kCouplingRejectionCap:
      return "CouplingRejectionCap";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

// All library failures are reported as an Error carrying a machine-readable
// code; the CLI maps codes to process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lattice_dp

#endif  // LATTICE_DP_STATUS_H_
