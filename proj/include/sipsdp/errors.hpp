#ifndef SIPSDP_ERRORS_HPP
#define SIPSDP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sipsdp {

// base class for everything this library throws
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// mismatched vector lengths, unknown variables, bad block references
struct DimensionError : Error {
  using Error::Error;
};

// violated degree/order preconditions (e.g. "t < d_K")
struct PreconditionError : Error {
  using Error::Error;
};

// malformed input files; carries a human-readable position
struct ParseError : Error {
  using Error::Error;
};

// numerical routine could not produce a trustworthy result
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace sipsdp

#endif
