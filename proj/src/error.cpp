#include "keygest/error.hpp"

namespace keygest {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingDirectory: return "missing directory";
    case ErrorCode::SequenceTooShort: return "sequence too short";
    case ErrorCode::UndecodableFile: return "undecodable file";
    case ErrorCode::InconsistentDimensions: return "inconsistent dimensions";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::FormatVersion: return "format version";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::DegenerateDataset: return "degenerate dataset";
  }
  return "unknown";
}

}  // namespace keygest
