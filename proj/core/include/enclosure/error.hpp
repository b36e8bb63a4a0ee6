#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace enclosure {

enum class ErrorCode {
  InvalidDirection,
  InvalidParameter,
  InvalidShape,
  InvalidDomain,
  DegenerateHull,
  DegenerateBackground,
  InvalidConstants,
  EmptySlab,
  InvalidScene,
  ResourceLimit,
  InvalidMesh,
  Assembly,
  Solve,
  Interface,
  ProbeUnderresolved,
  Estimation,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Solve failure carrying the interior residual that was reached.
class SolveError : public Error {
public:
  SolveError(const std::string& what, double residual)
      : Error(ErrorCode::Solve, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace enclosure
