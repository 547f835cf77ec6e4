#pragma once

#include <stdexcept>
#include <string>

namespace binbo
{
  /// Precondition violated by the caller (bad sizes, counts, ranges).
  class InvalidInput : public std::invalid_argument
  {
  public:
    using std::invalid_argument::invalid_argument;
  };

  /// Floating-point trouble: failed factorizations, non-finite objectives.
  class NumericalError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// Operation called on an object in the wrong state.
  class StateError : public std::logic_error
  {
  public:
    using std::logic_error::logic_error;
  };
}

namespace binbo
{
  /// Reading or writing an artifact file failed.
  class IoError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };
}
