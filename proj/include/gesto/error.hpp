// Copyright 2026 The Gesto Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gesto {

enum class Errc {
  kInvalidPose,
  kParameter,
  kInvalidInput,
  kDegenerateScan,
  kScanTooNoisy,
  kMode,
  kConflict,
  kFormat,
  kVersion,
  kCorruption,
  kParse,
  kIo,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidPose: return "invalid pose";
    case Errc::kParameter: return "parameter error";
    case Errc::kInvalidInput: return "invalid input";
    case Errc::kDegenerateScan: return "degenerate scan";
    case Errc::kScanTooNoisy: return "scan too noisy";
    case Errc::kMode: return "mode error";
    case Errc::kConflict: return "conflict";
    case Errc::kFormat: return "format error";
    case Errc::kVersion: return "version error";
    case Errc::kCorruption: return "corruption";
    case Errc::kParse: return "parse error";
    case Errc::kIo: return "i/o error";
  }
  return "error";
}

/// Base of every error thrown by the engine. The message starts with
/// errc_name(code()) so callers that only see text can still classify it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 protected:
  struct Verbatim {};
  Error(Errc code, const std::string& message, Verbatim)
      : std::runtime_error(message), code_(code) {}

 private:
  Errc code_;
};

/// Truncated or internally inconsistent binary payload.
class CorruptionError : public Error {
 public:
  CorruptionError(std::size_t offset, const std::string& detail)
      : Error(Errc::kCorruption,
              "corruption at byte " + std::to_string(offset) + ": " + detail, Verbatim{}),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Text input that failed to parse; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& detail)
      : Error(Errc::kParse, "line " + std::to_string(line) + ", column " +
                                std::to_string(column) + ": " + detail),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace gesto
