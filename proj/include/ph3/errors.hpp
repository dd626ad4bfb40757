#pragma once

#include <stdexcept>
#include <string>

namespace ph3 {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define PH3_DECLARE_ERROR(Name)                                       \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& detail) : Error(#Name, detail) {} \
  };

PH3_DECLARE_ERROR(NotPartiallyHyperbolicLinearization)
PH3_DECLARE_ERROR(NumericalUnderflow)
PH3_DECLARE_ERROR(DegenerateSplitting)
PH3_DECLARE_ERROR(HorizonTooSmall)
PH3_DECLARE_ERROR(TangencyViolation)
PH3_DECLARE_ERROR(InsufficientScale)
PH3_DECLARE_ERROR(NotOnLeaf)
PH3_DECLARE_ERROR(TailNotCertified)
PH3_DECLARE_ERROR(PlaqueCollision)
PH3_DECLARE_ERROR(UnsupportedDirection)
PH3_DECLARE_ERROR(NoIntersection)
PH3_DECLARE_ERROR(AmbiguousIntersection)
PH3_DECLARE_ERROR(ComplexPair)
PH3_DECLARE_ERROR(NewtonDiverged)
PH3_DECLARE_ERROR(DegenerateJacobian)
PH3_DECLARE_ERROR(UsageError)
PH3_DECLARE_ERROR(FormatError)

#undef PH3_DECLARE_ERROR

}  // namespace ph3
