#pragma once

#include <stdexcept>
#include <string>

namespace explorer {

enum class ErrorKind {
  Schema,
  Validation,
  UnsupportedMapping,
  RobotUnknown,
  DimensionMismatch,
  InfeasibleInput,
  EndpointMismatch,
  NoPathFound,
  OracleIncomplete,
  NodeUnknown,
  LevelExhausted,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure the library reports. `field` names the offending document
/// field or object when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::UnsupportedMapping: return "UnsupportedMapping";
    case ErrorKind::RobotUnknown: return "RobotUnknown";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InfeasibleInput: return "InfeasibleInput";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::NoPathFound: return "NoPathFound";
    case ErrorKind::OracleIncomplete: return "OracleIncomplete";
    case ErrorKind::NodeUnknown: return "NodeUnknown";
    case ErrorKind::LevelExhausted: return "LevelExhausted";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace explorer
