#pragma once

#include <stdexcept>
#include <string>

namespace mrsim {

enum class ErrorCode {
  InvalidArgument,
  OutOfRange,
  Unsupported,
  Io,
  Numeric,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, std::string const &what)
    : std::runtime_error(what)
    , code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string const &what) { throw Error(code, what); }

inline void require(bool condition, std::string const &what)
{
  if (!condition) { fail(ErrorCode::InvalidArgument, what); }
}

} // namespace mrsim
