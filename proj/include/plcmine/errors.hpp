#pragma once

#include <stdexcept>
#include <string>

namespace plcmine {

// Every error raised by the library derives from Error so callers can catch
// one type and still report the stage-specific message.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct NotEnabledError : Error { using Error::Error; };
struct UnknownActivityError : Error { using Error::Error; };
struct OrderingError : Error { using Error::Error; };
struct WiringError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct ConfigurationError : Error { using Error::Error; };
struct ComparisonError : Error { using Error::Error; };
struct NoModelError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct InvariantError : Error { using Error::Error; };

}  // namespace plcmine
