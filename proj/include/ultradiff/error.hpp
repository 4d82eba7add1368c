#pragma once

#include <stdexcept>
#include <string>

namespace ultradiff {

enum class ErrorCode {
  ParseError,
  InvalidInput,
  CyclicInput,
  DuplicatePrime,
  NotPrime,
  UnknownPrimeFactor,
  AmbiguousOrientation,
  DisconnectedGraph,
  CycleDetected,
  PrimeMismatch,
  LevelTooCoarse,
  CellOutsideZ,
  InvalidLevel,
  TooLarge,
  BallOutsideZ,
  BadJ,
  LeafNode,
  TrivialCharacter,
  IncompleteBasis,
  DimensionMismatch,
  NegativeTime,
  BoundViolated,
};

/// Name of the error as it appears in CLI diagnostics ("CyclicInput", ...).
const char* error_name(ErrorCode code);

/// Process exit status for an error. ParseError is 2; every other code is distinct.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace ultradiff
