#include "ultradiff/error.hpp"

namespace ultradiff {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::CyclicInput: return "CyclicInput";
    case ErrorCode::DuplicatePrime: return "DuplicatePrime";
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::UnknownPrimeFactor: return "UnknownPrimeFactor";
    case ErrorCode::AmbiguousOrientation: return "AmbiguousOrientation";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::PrimeMismatch: return "PrimeMismatch";
    case ErrorCode::LevelTooCoarse: return "LevelTooCoarse";
    case ErrorCode::CellOutsideZ: return "CellOutsideZ";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BallOutsideZ: return "BallOutsideZ";
    case ErrorCode::BadJ: return "BadJ";
    case ErrorCode::LeafNode: return "LeafNode";
    case ErrorCode::TrivialCharacter: return "TrivialCharacter";
    case ErrorCode::IncompleteBasis: return "IncompleteBasis";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::BoundViolated: return "BoundViolated";
  }
  return "UnknownError";
}

int exit_status(ErrorCode code) {
  // 1 is reserved for unexpected failures, 2 for parse errors.
  switch (code) {
    case ErrorCode::ParseError: return 2;
    case ErrorCode::InvalidInput: return 3;
    case ErrorCode::CyclicInput: return 10;
    case ErrorCode::DuplicatePrime: return 11;
    case ErrorCode::NotPrime: return 12;
    case ErrorCode::UnknownPrimeFactor: return 13;
    case ErrorCode::AmbiguousOrientation: return 14;
    case ErrorCode::DisconnectedGraph: return 20;
    case ErrorCode::CycleDetected: return 30;
    case ErrorCode::PrimeMismatch: return 40;
    case ErrorCode::LevelTooCoarse: return 41;
    case ErrorCode::CellOutsideZ: return 50;
    case ErrorCode::InvalidLevel: return 51;
    case ErrorCode::TooLarge: return 52;
    case ErrorCode::BallOutsideZ: return 60;
    case ErrorCode::BadJ: return 61;
    case ErrorCode::LeafNode: return 62;
    case ErrorCode::TrivialCharacter: return 63;
    case ErrorCode::IncompleteBasis: return 64;
    case ErrorCode::DimensionMismatch: return 65;
    case ErrorCode::NegativeTime: return 70;
    case ErrorCode::BoundViolated: return 71;
  }
  return 1;
}

}  // namespace ultradiff
