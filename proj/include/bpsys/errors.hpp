#pragma once

#include <stdexcept>
#include <string>

namespace bpsys {

/// Root of every exception thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotEnabled : Error {
  using Error::Error;
};

struct DomainMismatch : Error {
  using Error::Error;
};

struct PreconditionFailed : Error {
  using Error::Error;
};

struct NotFound : Error {
  using Error::Error;
};

struct NotRestrictedFreeChoice : Error {
  using Error::Error;
};

struct NotReconstructible : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

/// A bounded search ran out of budget. Callers turn these into inconclusive
/// outcomes; they never become a pass or a fail.
struct CapExceeded : Error {
  using Error::Error;
};

struct StateCapExceeded : CapExceeded {
  using CapExceeded::CapExceeded;
};

struct CircuitCapExceeded : CapExceeded {
  using CapExceeded::CapExceeded;
};

struct SearchCapExceeded : CapExceeded {
  using CapExceeded::CapExceeded;
};

/// An outcome that the free-choice / BP theory proves impossible was
/// observed. Always loud: it marks either a bug or a broken theorem.
struct TheoremViolation : Error {
  TheoremViolation(const std::string& result, const std::string& what)
      : Error(result + " violated: " + what), result(result) {}
  std::string result;
};

}  // namespace bpsys
