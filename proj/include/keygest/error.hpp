#pragma once

#include <stdexcept>
#include <string>

namespace keygest {

enum class ErrorCode {
  MissingDirectory,
  SequenceTooShort,
  UndecodableFile,
  InconsistentDimensions,
  InvalidArgument,
  DimensionMismatch,
  OutOfRange,
  FormatVersion,
  Io,
  DegenerateDataset,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() distinguishes them.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace keygest
