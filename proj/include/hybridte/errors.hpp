#pragma once

#include <stdexcept>
#include <string>

namespace hybridte {

// Error categories map 1:1 to CLI exit codes (see tools/).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad command line / bad argument combination.
struct UsageError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (files, topologies, demands).
struct DataError : Error {
  using Error::Error;
};

// No feasible result exists (no separator, infeasible model, size gate).
struct InfeasibleError : Error {
  using Error::Error;
};

// External solver misbehaved (bad exit code, unparseable output).
struct SolverError : Error {
  using Error::Error;
};

}  // namespace hybridte
