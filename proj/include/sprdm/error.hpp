#pragma once

#include <stdexcept>
#include <string>

namespace sprdm {

// Base class for every error this library throws deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPRDM_DEFINE_ERROR(name)          \
  class name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

SPRDM_DEFINE_ERROR(DimensionMismatch);
SPRDM_DEFINE_ERROR(SingularSystem);
SPRDM_DEFINE_ERROR(UnknownExponent);
SPRDM_DEFINE_ERROR(EmptySequence);
SPRDM_DEFINE_ERROR(OutOfRange);
SPRDM_DEFINE_ERROR(HorizonOutOfRange);
SPRDM_DEFINE_ERROR(CorruptModelFile);
SPRDM_DEFINE_ERROR(NonFiniteLoss);
SPRDM_DEFINE_ERROR(InsufficientPairs);
SPRDM_DEFINE_ERROR(UnknownHorizon);
SPRDM_DEFINE_ERROR(ZeroProbabilityObservation);
SPRDM_DEFINE_ERROR(DegenerateData);
SPRDM_DEFINE_ERROR(TooFewSequences);
SPRDM_DEFINE_ERROR(ParseError);
SPRDM_DEFINE_ERROR(InconsistentDims);
SPRDM_DEFINE_ERROR(InvalidConfig);
SPRDM_DEFINE_ERROR(IoError);
SPRDM_DEFINE_ERROR(NoValidPositions);

#undef SPRDM_DEFINE_ERROR

}  // namespace sprdm
