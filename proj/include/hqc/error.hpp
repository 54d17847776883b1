#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hqc {

enum class ErrorCode {
  NonUnitaryMatrix,
  WireOutOfRange,
  NoiseOutOfRange,
  InvalidPartition,
  TooManyQubits,
  ParamCountMismatch,
  UnsupportedKind,
  UnsupportedSize,
  DimensionMismatch,
  EmptyBatch,
  LabelOutOfRange,
  MissingSplit,
  VersionError,
  ParseError,
  MagicMismatch,
  TruncatedFile,
  RankDeficient,
  DegenerateFeature,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure raised by hqc carries one of the
/// codes above so callers (and the CLI) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hqc
