#pragma once

#include <stdexcept>
#include <string>

namespace bmd {

struct ZeroAtomInKL : std::runtime_error {
  explicit ZeroAtomInKL(const std::string& msg) : std::runtime_error(msg) {}
};

struct SinkhornDiverged : std::runtime_error {
  explicit SinkhornDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

struct InnerSolveFailed : std::runtime_error {
  explicit InnerSolveFailed(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeExceeded : std::runtime_error {
  explicit SizeExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct LevelMismatch : std::runtime_error {
  explicit LevelMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteState : std::runtime_error {
  explicit NonFiniteState(const std::string& msg) : std::runtime_error(msg) {}
};

struct ImplicitStepDiverged : std::runtime_error {
  explicit ImplicitStepDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

struct CalibrationFailed : std::runtime_error {
  explicit CalibrationFailed(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleDidNotConverge : std::runtime_error {
  explicit OracleDidNotConverge(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleTooLarge : std::runtime_error {
  explicit OracleTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidMeasure : std::runtime_error {
  explicit InvalidMeasure(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : ConfigError {
  explicit ParseError(const std::string& msg) : ConfigError(msg) {}
};

struct SchemaError : ConfigError {
  explicit SchemaError(const std::string& msg) : ConfigError(msg) {}
};

struct RangeError : ConfigError {
  explicit RangeError(const std::string& msg) : ConfigError(msg) {}
};

struct IncompatibleReports : std::runtime_error {
  explicit IncompatibleReports(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bmd
