#pragma once

#include <stdexcept>
#include <string>

namespace seqcs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficientError : Error {
  using Error::Error;
};

struct ZeroColumnError : Error {
  using Error::Error;
};

struct NonFiniteError : Error {
  using Error::Error;
};

struct DegreesOfFreedomError : Error {
  using Error::Error;
};

struct ConvergenceFailureError : Error {
  using Error::Error;
};

struct IterationLimitError : Error {
  using Error::Error;
};

struct NoProgressError : Error {
  using Error::Error;
};

struct SlackStuckError : Error {
  using Error::Error;
};

struct InfeasibleReconstructionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace seqcs
