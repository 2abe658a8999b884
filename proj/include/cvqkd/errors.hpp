#pragma once

#include <stdexcept>
#include <string>

namespace cvqkd {

/// Coarse failure classes; the CLI maps validation -> exit 2 and
/// numerical -> exit 3.
enum class ErrorCategory { validation, numerical };

/// Base of all library errors. what() is "<Kind>: <detail>" so callers and
/// diagnostics can name the failure kind without RTTI.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& detail)
      : Error(ErrorCategory::validation, "InvalidParameter", detail) {}
};

struct UnphysicalParameter : Error {
  explicit UnphysicalParameter(const std::string& detail)
      : Error(ErrorCategory::validation, "UnphysicalParameter", detail) {}
};

/// A state (or requested state) violating the uncertainty relation.
struct UnphysicalState : Error {
  explicit UnphysicalState(const std::string& detail)
      : Error(ErrorCategory::validation, "UnphysicalState", detail) {}
};

/// Measured statistics outside the physically meaningful region.
struct InvalidStatistics : Error {
  explicit InvalidStatistics(const std::string& detail)
      : Error(ErrorCategory::validation, "InvalidStatistics", detail) {}
};

struct InsufficientData : Error {
  explicit InsufficientData(const std::string& detail)
      : Error(ErrorCategory::validation, "InsufficientData", detail) {}
};

struct MalformedInput : Error {
  explicit MalformedInput(const std::string& detail)
      : Error(ErrorCategory::validation, "MalformedInput", detail) {}
};

/// Channel parameters inconsistent with the observed data.
struct InconsistentEstimate : Error {
  explicit InconsistentEstimate(const std::string& detail)
      : Error(ErrorCategory::validation, "InconsistentEstimate", detail) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& detail)
      : Error(ErrorCategory::validation, "ConfigError", detail) {}
};

struct NumericalFailure : Error {
  explicit NumericalFailure(const std::string& detail)
      : Error(ErrorCategory::numerical, "NumericalFailure", detail) {}
};

/// The purified state failed to reproduce its input submatrix; indicates a
/// convention bug, never expected on valid inputs.
struct ReconstructionMismatch : Error {
  explicit ReconstructionMismatch(const std::string& detail)
      : Error(ErrorCategory::numerical, "ReconstructionMismatch", detail) {}
};

}  // namespace cvqkd
