#include "hmflow/errors.hpp"

namespace hmflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleSingular: return "PoleSingular";
    case ErrorKind::DegenerateSpec: return "DegenerateSpec";
    case ErrorKind::GluingMismatch: return "GluingMismatch";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::CircleOutOfRange: return "CircleOutOfRange";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::InsufficientSpread: return "InsufficientSpread";
    case ErrorKind::WindowEmpty: return "WindowEmpty";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace hmflow
