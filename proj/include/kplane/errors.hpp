#pragma once

#include <stdexcept>
#include <string>

namespace kplane {

// Every failure raised by the library derives from Error so the CLI can
// report it uniformly; the subclass says which contract was broken.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct GateError : Error { using Error::Error; };
struct UnsupportedGeometry : Error { using Error::Error; };
struct SamplingError : Error { using Error::Error; };
struct DiagnosticError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };
struct SplitError : Error { using Error::Error; };
struct RatioError : Error { using Error::Error; };
struct DriverError : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace kplane
