#pragma once

#include <stdexcept>
#include <string>

namespace opmark {

// Error conditions named by the module contracts. Everything derives from
// std::runtime_error so callers can catch broadly or by specific condition.

struct MalformedListing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateSymbol : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyProgram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingleClassDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyEvalSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewSubroutines : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace opmark
