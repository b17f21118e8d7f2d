#pragma once

#include <stdexcept>
#include <string>

namespace tide {

enum class ErrorCode {
  kInvalidInput,
  kInvalidConfig,
  kInvalidLabel,
  kIo,
  kCorruptDataset,
  kGeneration,
  kTripletExhausted,
  kUnknownClass,
  kProvider,
  kUndefinedOverlap,
  kEmptyClass,
  kMissingConceptSupport,
  kEmptyReport,
  kZeroNorm,
  kRuntime,
};

const char* error_code_name(ErrorCode code);

// Single exception type used across the library; the C API maps the code
// to a return status and keeps the message retrievable per session.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kIo: return "IOError";
    case ErrorCode::kCorruptDataset: return "CorruptDataset";
    case ErrorCode::kGeneration: return "GenerationError";
    case ErrorCode::kTripletExhausted: return "TripletExhausted";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kProvider: return "ProviderError";
    case ErrorCode::kUndefinedOverlap: return "UndefinedOverlap";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kMissingConceptSupport: return "MissingConceptSupport";
    case ErrorCode::kEmptyReport: return "EmptyReport";
    case ErrorCode::kZeroNorm: return "ZeroNormError";
    case ErrorCode::kRuntime: return "RuntimeError";
  }
  return "Error";
}

}  // namespace tide
