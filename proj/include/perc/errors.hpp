#pragma once

#include <stdexcept>
#include <string>

namespace perc {

// Failure categories named by the contracts that raise them. The CLI maps
// all of these to exit code 2 (numerical failure); verification findings
// are results, not exceptions.
enum class Errc {
  EmptyInitial,
  OddColumn,
  WindowExceeded,
  EmptySet,
  NoPath,
  BracketFailure,
  TooLarge,
  WindowMismatch,
  InvalidCoupling,
  Degenerate,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace perc
