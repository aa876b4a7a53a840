#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace whitneyopt {

enum class ErrorCode {
  kSyntax,
  kUnknownVariable,
  kBadExponent,
  kOrderMismatch,
  kInvalidArgument,
  kConstantMember,
  kDuplicateMvar,
  kNotEliminable,
  kEmptyGstar,
  kRankDeficient,
  kNotRegular,
  kNoRealRoot,
  kAmbiguousRoot,
  kDiverged,
  kInvalidStart,
  kStartOffManifold,
  kLiftCheckFailed,
  kIo,
};

/// Stable machine-readable name, e.g. "CONSTANT_MEMBER".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the polynomial parser. `offset` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, const std::string& message)
      : Error(code, message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace whitneyopt
