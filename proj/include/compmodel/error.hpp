#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace compmodel {

enum class ErrorKind {
  DuplicateName,
  UnresolvedReference,
  EquationInterfaceMismatch,
  FlagContradiction,
  UndefinedOnGenerator,
  UndefinedOnVariable,
  TargetSourceMismatch,
  InterfaceMismatch,
  SignatureMismatch,
  InvalidDiagram,
  UnboundGenerator,
  UnsupportedStructural,
  DimensionMismatch,
  IndexOutOfRange,
  ObjectMismatch,
  TypeMismatch,
  FlagViolation,
  EquationViolation,
  UnsupportedLanguage,
  UnsupportedBackend,
  BoundaryMismatch,
  MultiOutputBox,
  DuplicateLabel,
  NonChannelMechanism,
  NotAVariable,
  NotSharp,
  CycleIntroduced,
  NotChannel,
  ZeroSupport,
  ZeroSupportObservation,
  InvalidWorldSpec,
  NonChannelBox,
  InfiniteCarrier,
  BoxNotFound,
  WireNotFound,
  NoCopyInLanguage,
  TargetUnreachable,
  EpsilonExceeded,
  NotDeterministic,
  NoSharpStateGenerator,
  InvalidMatch,
  UnknownWord,
  DomainMismatch,
  ArityMismatch,
  ParseError,
  SchemaVersionMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure in the library is reported through this type.
class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorKind kind, const std::string& message);
  ModelError(ErrorKind kind, const std::string& message, double value);

  ErrorKind kind() const noexcept { return kind_; }
  // Numeric payload for errors that carry one (e.g. a measured distance).
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_ = 0.0;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace compmodel
