#pragma once

#include <stdexcept>
#include <string>

namespace kdt {

enum class Errc {
  FissionOfLeafless,
  CoordOutOfRange,
  AxisOutOfRange,
  ArityMismatch,
  MalformedCode,
  GridTooLarge,
  BadFormat,
  FileNotFound,
  SingularElementary,
  SingularMatrix,
  HomogeneousDivideByZero,
  DegenerateShape,
  PrecisionOutOfRange,
  ZeroMass,
  ZeroDispersion,
  CoincidentCenters,
  ValueOutOfRange,
  EmptyPyramid,
  EmptyBase,
  SupportMismatch,
  IndexOutOfRange,
  CapacityExceeded,
  EmptyFrame,
  UnknownCommand,
  TypeMismatch,
  SyntaxError,
  NotImplemented,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace kdt
