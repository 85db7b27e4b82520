#pragma once

#include <stdexcept>
#include <string>

namespace beliefroute {

/// Broad failure class; the CLI maps each one to its own exit code.
enum class ErrorCategory {
  kConfig,
  kMap,
  kPlanner,
  kEstimation,
  kSimulation,
  kArtifact,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Input parsing / validation. Category distinguishes map files from config
// files.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Roadmap construction and circuit generation.
class SamplingExhaustedError : public Error {
 public:
  explicit SamplingExhaustedError(const std::string& what)
      : Error(ErrorCategory::kPlanner, what) {}
};

class DisconnectedGraphError : public Error {
 public:
  explicit DisconnectedGraphError(const std::string& what)
      : Error(ErrorCategory::kPlanner, what) {}
};

class NotEulerianError : public Error {
 public:
  explicit NotEulerianError(const std::string& what)
      : Error(ErrorCategory::kPlanner, what) {}
};

class InvalidCircuitError : public Error {
 public:
  explicit InvalidCircuitError(const std::string& what)
      : Error(ErrorCategory::kPlanner, what) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& what)
      : Error(ErrorCategory::kPlanner, what) {}
};

// Degenerate measurement geometry or numerically singular innovation. The
// planner and the online filter catch these and skip the offending update.
class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what)
      : Error(ErrorCategory::kEstimation, what) {}
};

class SingularInnovationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class AttitudeSingularityError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class NearOriginSingularityError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class HorizonSingularityError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(const std::string& what)
      : Error(ErrorCategory::kArtifact, what) {}
};

class UnknownSelectionError : public Error {
 public:
  explicit UnknownSelectionError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

}  // namespace beliefroute
