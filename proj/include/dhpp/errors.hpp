#pragma once

#include <stdexcept>
#include <string>

namespace dhpp {

// Base class for all recoverable errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct MissingCoordinates : Error {
  using Error::Error;
};

struct DisconnectedGraph : Error {
  using Error::Error;
};

struct InvalidSizeRange : Error {
  using Error::Error;
};

struct KTooLarge : Error {
  using Error::Error;
};

struct InfeasibleK : Error {
  using Error::Error;
};

struct EmptyScenario : Error {
  using Error::Error;
};

struct EntityUniverseMismatch : Error {
  using Error::Error;
};

struct UncoveredVcp : Error {
  using Error::Error;
};

struct InfeasibleBudget : Error {
  using Error::Error;
};

struct InstanceTooLarge : Error {
  using Error::Error;
};

struct EmptyGroup : Error {
  using Error::Error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace dhpp
