#include "compmodel/error.hpp"

namespace compmodel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UnresolvedReference: return "UnresolvedReference";
    case ErrorKind::EquationInterfaceMismatch: return "EquationInterfaceMismatch";
    case ErrorKind::FlagContradiction: return "FlagContradiction";
    case ErrorKind::UndefinedOnGenerator: return "UndefinedOnGenerator";
    case ErrorKind::UndefinedOnVariable: return "UndefinedOnVariable";
    case ErrorKind::TargetSourceMismatch: return "TargetSourceMismatch";
    case ErrorKind::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorKind::SignatureMismatch: return "SignatureMismatch";
    case ErrorKind::InvalidDiagram: return "InvalidDiagram";
    case ErrorKind::UnboundGenerator: return "UnboundGenerator";
    case ErrorKind::UnsupportedStructural: return "UnsupportedStructural";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ObjectMismatch: return "ObjectMismatch";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::FlagViolation: return "FlagViolation";
    case ErrorKind::EquationViolation: return "EquationViolation";
    case ErrorKind::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorKind::UnsupportedBackend: return "UnsupportedBackend";
    case ErrorKind::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorKind::MultiOutputBox: return "MultiOutputBox";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::NonChannelMechanism: return "NonChannelMechanism";
    case ErrorKind::NotAVariable: return "NotAVariable";
    case ErrorKind::NotSharp: return "NotSharp";
    case ErrorKind::CycleIntroduced: return "CycleIntroduced";
    case ErrorKind::NotChannel: return "NotChannel";
    case ErrorKind::ZeroSupport: return "ZeroSupport";
    case ErrorKind::ZeroSupportObservation: return "ZeroSupportObservation";
    case ErrorKind::InvalidWorldSpec: return "InvalidWorldSpec";
    case ErrorKind::NonChannelBox: return "NonChannelBox";
    case ErrorKind::InfiniteCarrier: return "InfiniteCarrier";
    case ErrorKind::BoxNotFound: return "BoxNotFound";
    case ErrorKind::WireNotFound: return "WireNotFound";
    case ErrorKind::NoCopyInLanguage: return "NoCopyInLanguage";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::EpsilonExceeded: return "EpsilonExceeded";
    case ErrorKind::NotDeterministic: return "NotDeterministic";
    case ErrorKind::NoSharpStateGenerator: return "NoSharpStateGenerator";
    case ErrorKind::InvalidMatch: return "InvalidMatch";
    case ErrorKind::UnknownWord: return "UnknownWord";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ModelError::ModelError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

ModelError::ModelError(ErrorKind kind, const std::string& message, double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      value_(value) {}

void fail(ErrorKind kind, const std::string& message) { throw ModelError(kind, message); }

}  // namespace compmodel
