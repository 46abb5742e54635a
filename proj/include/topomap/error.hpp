#pragma once

#include <stdexcept>
#include <string>

namespace topomap {

enum class ErrorCode {
  Parse,
  EmptyCloud,
  Io,
  DegenerateSignal,
  NoPeaks,
  Alternation,
  Capacity,
  NoSeed,
  DimensionMismatch,
  InvalidArgument,
  Internal,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type; the code lets the CLI
// map failures onto exit statuses.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorCode::Parse, what + " (at byte " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::EmptyCloud: return "empty-cloud";
    case ErrorCode::Io: return "io";
    case ErrorCode::DegenerateSignal: return "degenerate-signal";
    case ErrorCode::NoPeaks: return "no-peaks";
    case ErrorCode::Alternation: return "alternation";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::NoSeed: return "no-seed";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace topomap
