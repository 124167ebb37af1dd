#pragma once

#include <stdexcept>
#include <string>

namespace chsbs {

enum class ErrorCode {
  InvalidArgument,
  Domain,
  Criticality,   // evaluation exactly at a pole of the vertex
  NoSignChange,  // critical-temperature scan found no crossing
  FitRejected,
  Quadrature,
  Singular,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace chsbs
