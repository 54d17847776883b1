#include "hqc/error.hpp"

namespace hqc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUnitaryMatrix: return "NonUnitaryMatrix";
    case ErrorCode::WireOutOfRange: return "WireOutOfRange";
    case ErrorCode::NoiseOutOfRange: return "NoiseOutOfRange";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::ParamCountMismatch: return "ParamCountMismatch";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::MissingSplit: return "MissingSplit";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hqc
