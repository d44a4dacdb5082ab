// Copyright 2026 The asrkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asrkit {

/// Every failure raised by the library carries one of these codes.
enum class Errc {
  // audio_io
  NotWav,
  UnsupportedFormat,
  Truncated,
  IoFailure,
  InvalidSpec,
  ParseError,
  // vad_segment
  EmptyAudio,
  UnsortedChunks,
  // alignment / metrics
  AllEmptyReferences,
  EmptyInput,
  ZeroDuration,
  BaselineZero,
  EmptyDeltas,
  // transducer
  LabelOutOfRange,
  TooLarge,
  NonFinite,
  Overflow,
  // bestrq
  IndexOutOfRange,
  DimensionMismatch,
  ShapeMismatch,
  // benchgen
  SampleRateMismatch,
  ZeroAudio,
  WorkloadFailure,
  // generic precondition failure (bad config value, bad argument)
  InvalidArgument,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NotWav: return "NotWav";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::Truncated: return "Truncated";
    case Errc::IoFailure: return "IoFailure";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyAudio: return "EmptyAudio";
    case Errc::UnsortedChunks: return "UnsortedChunks";
    case Errc::AllEmptyReferences: return "AllEmptyReferences";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ZeroDuration: return "ZeroDuration";
    case Errc::BaselineZero: return "BaselineZero";
    case Errc::EmptyDeltas: return "EmptyDeltas";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::NonFinite: return "NonFinite";
    case Errc::Overflow: return "Overflow";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SampleRateMismatch: return "SampleRateMismatch";
    case Errc::ZeroAudio: return "ZeroAudio";
    case Errc::WorkloadFailure: return "WorkloadFailure";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace asrkit
