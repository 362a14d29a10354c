// fairdet/error.hpp
//
// Copyright 2026 The fairdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRDET_ERROR_HPP_
#define FAIRDET_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fairdet {

// Every failure the library raises carries one of these codes. The CLI maps
// cross_check_mismatch to exit code 2 (internal self-check failure) and
// everything else to exit code 1 (input or configuration error).
enum class errc {
  malformed_row,         // wrong column count, bad token, bad number
  duplicate_utt,         // utt_id seen twice in one file
  empty_file,            // no records after comment/blank stripping
  non_finite_score,      // score parsed to NaN or +-inf
  non_finite_input,      // NaN or +-inf passed to a numeric entry point
  missing_score,         // trial without a matching score row
  orphan_score,          // score without a matching trial (strict join)
  degenerate_set,        // a class is absent where both are required
  polarity_mismatch,     // operating point and set disagree on orientation
  length_mismatch,       // decision vector does not align with its set
  missing_group,         // configured group absent from the data
  cross_check_mismatch,  // the two fairness paths disagree: a bug, not input
  invalid_p,             // p-value outside [0,1]
  invalid_sample,        // proportion sample with k < 0, k > n, or n < 1
  cap_exceeded,          // generator cell count above the configured cap
  too_large,             // brute-force oracle asked to process too many trials
  config_error,          // unusable run configuration
  io_error,              // file could not be read or written
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::malformed_row: return "malformed_row";
    case errc::duplicate_utt: return "duplicate_utt";
    case errc::empty_file: return "empty_file";
    case errc::non_finite_score: return "non_finite_score";
    case errc::non_finite_input: return "non_finite_input";
    case errc::missing_score: return "missing_score";
    case errc::orphan_score: return "orphan_score";
    case errc::degenerate_set: return "degenerate_set";
    case errc::polarity_mismatch: return "polarity_mismatch";
    case errc::length_mismatch: return "length_mismatch";
    case errc::missing_group: return "missing_group";
    case errc::cross_check_mismatch: return "cross_check_mismatch";
    case errc::invalid_p: return "invalid_p";
    case errc::invalid_sample: return "invalid_sample";
    case errc::cap_exceeded: return "cap_exceeded";
    case errc::too_large: return "too_large";
    case errc::config_error: return "config_error";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw error(code, message);
}

}  // namespace fairdet

#endif  // FAIRDET_ERROR_HPP_
