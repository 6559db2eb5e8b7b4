#pragma once

#include <stdexcept>
#include <string>

namespace imlab {

// Every failure the library reports is one of these. Callers that only care
// about "something went wrong" catch imlab::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IMLAB_DEFINE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  };

IMLAB_DEFINE_ERROR(ShapeError)        // mismatched kind / dimension / truncation
IMLAB_DEFINE_ERROR(TruncationError)   // projection to a larger space
IMLAB_DEFINE_ERROR(CapabilityError)   // unsupported (variant, operation) pair
IMLAB_DEFINE_ERROR(DomainError)       // argument outside the admitted domain
IMLAB_DEFINE_ERROR(ResourceError)     // collocation grid over budget
IMLAB_DEFINE_ERROR(StiffnessError)    // integrator step underflow
IMLAB_DEFINE_ERROR(DivergenceError)   // nonfinite state
IMLAB_DEFINE_ERROR(DataError)         // missing recorded data
IMLAB_DEFINE_ERROR(ConfigError)       // config parse / validation
IMLAB_DEFINE_ERROR(IoError)           // file format / filesystem

#undef IMLAB_DEFINE_ERROR

}  // namespace imlab
