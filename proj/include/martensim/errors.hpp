#pragma once

#include <stdexcept>
#include <string>

namespace marten {

enum class ErrorKind {
  InvalidParameter,   // bad numeric/config input (gamma <= 0, delta out of range, ...)
  OutsideHull,        // matrix fails the interior membership test
  DegenerateSplit,    // no strict lamination split exists
  InvalidPoint,       // point not inside the required region
  InvalidPlacement,   // band geometry incompatible with the requested operation
  GeometryError,      // inconsistent partition / non-conforming interfaces
  InsufficientData,   // not enough bins/samples for a fit or estimate
  EmptySource,        // no measurable elements in the requested source
  SchemaError,        // config file fails validation
  IoError,            // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace marten
