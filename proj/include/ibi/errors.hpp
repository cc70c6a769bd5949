#pragma once

#include <stdexcept>
#include <string>

namespace ibi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on argument values or sizes does not hold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The geometry is too degenerate (collinear, coincident, constant) to proceed.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Average payoff x^T Pi x vanished; the population carries no mutual consistency.
class DegeneratePayoff : public Error {
 public:
  using Error::Error;
};

class InsufficientCorrespondences : public Error {
 public:
  using Error::Error;
};

/// No non-collinear triple exists in the sampled set.
class TooDegenerate : public Error {
 public:
  using Error::Error;
};

/// Per-correspondence NNSR ratios were requested but are not available.
class MissingScores : public Error {
 public:
  using Error::Error;
};

}  // namespace ibi
