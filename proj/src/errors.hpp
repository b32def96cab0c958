#pragma once

#include <stdexcept>
#include <string>

namespace dagcast {

// Every failure the library can report, grouped by what the caller can do
// about it: fix the input (exit code 2) or hit a solver/resource wall (3).
enum class Err {
  Input,
  Cycle,
  Unreachable,
  BadCapacity,
  DuplicateEdge,
  TooManyEdges,
  SourceCut,
  NonErgodicChain,
  RateAboveCapacity,
  UnknownConfiguration,
  SeriesTooShort,
  TooManyMatchings,
  TooManyCuts,
  TooManyOddSets,
  TableTooLarge,
  LpNumericalFailure,
  InvariantViolation,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::Input: return "InputError";
    case Err::Cycle: return "CycleError";
    case Err::Unreachable: return "UnreachableError";
    case Err::BadCapacity: return "CapacityError";
    case Err::DuplicateEdge: return "DuplicateEdgeError";
    case Err::TooManyEdges: return "TooManyEdgesError";
    case Err::SourceCut: return "SourceCutError";
    case Err::NonErgodicChain: return "NonErgodicChain";
    case Err::RateAboveCapacity: return "RateAboveCapacity";
    case Err::UnknownConfiguration: return "UnknownConfiguration";
    case Err::SeriesTooShort: return "SeriesTooShort";
    case Err::TooManyMatchings: return "TooManyMatchings";
    case Err::TooManyCuts: return "TooManyCuts";
    case Err::TooManyOddSets: return "TooManyOddSets";
    case Err::TableTooLarge: return "TableTooLarge";
    case Err::LpNumericalFailure: return "LPNumericalFailure";
    case Err::InvariantViolation: return "InvariantViolation";
  }
  return "UnknownError";
}

// 2 = caller can fix the input, 3 = computational failure or resource guard.
inline int err_exit_code(Err e) {
  switch (e) {
    case Err::TooManyMatchings:
    case Err::TooManyCuts:
    case Err::TooManyOddSets:
    case Err::TableTooLarge:
    case Err::LpNumericalFailure:
    case Err::InvariantViolation:
      return 3;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace dagcast
