#pragma once

#include <stdexcept>
#include <string>

namespace sps {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define SPS_DEFINE_ERROR(Name)                                           \
  class Name : public Error {                                            \
   public:                                                               \
    using Error::Error;                                                  \
    const char* kind() const noexcept override { return #Name; }         \
  };

SPS_DEFINE_ERROR(ParseError)
SPS_DEFINE_ERROR(ValidationError)
SPS_DEFINE_ERROR(NotIrreducible)
SPS_DEFINE_ERROR(NotEssential)
SPS_DEFINE_ERROR(OffSupport)
SPS_DEFINE_ERROR(DegreeMismatch)
SPS_DEFINE_ERROR(DegreeOverflow)
SPS_DEFINE_ERROR(GraphMismatch)
SPS_DEFINE_ERROR(SizeMismatch)
SPS_DEFINE_ERROR(NotGraphIso)
SPS_DEFINE_ERROR(NotAShift)
SPS_DEFINE_ERROR(NotHomogeneous)
SPS_DEFINE_ERROR(NotUnitModulus)
SPS_DEFINE_ERROR(NoConvergence)

#undef SPS_DEFINE_ERROR

}  // namespace sps
