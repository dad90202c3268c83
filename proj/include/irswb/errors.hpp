#pragma once

#include <stdexcept>
#include <string>

namespace irswb {

// Every library failure derives from Error so the CLI can map it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IRSWB_DEFINE_ERROR(Name)              \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  };

IRSWB_DEFINE_ERROR(InvalidArgument)
IRSWB_DEFINE_ERROR(DegreeMismatch)
IRSWB_DEFINE_ERROR(ClosureExceedsCap)
IRSWB_DEFINE_ERROR(NotTransitive)
IRSWB_DEFINE_ERROR(DegreeTooLarge)
IRSWB_DEFINE_ERROR(NotASubgroup)
IRSWB_DEFINE_ERROR(NotConjInvariant)
IRSWB_DEFINE_ERROR(BadFactorization)
IRSWB_DEFINE_ERROR(BadTransporterSet)
IRSWB_DEFINE_ERROR(DepthExceeded)
IRSWB_DEFINE_ERROR(RootHasNoLabel)
IRSWB_DEFINE_ERROR(ColourSchemeMismatch)
IRSWB_DEFINE_ERROR(DepthMismatch)
IRSWB_DEFINE_ERROR(BudgetExceeded)
IRSWB_DEFINE_ERROR(DomainError)
IRSWB_DEFINE_ERROR(KTooLarge)
IRSWB_DEFINE_ERROR(LabelPartitionViolated)
IRSWB_DEFINE_ERROR(LabelMismatch)
IRSWB_DEFINE_ERROR(IncompatibleChain)
IRSWB_DEFINE_ERROR(MalformedPair)
IRSWB_DEFINE_ERROR(AddressTooShallow)
IRSWB_DEFINE_ERROR(ParseError)
IRSWB_DEFINE_ERROR(InvalidExperiment)

#undef IRSWB_DEFINE_ERROR

}  // namespace irswb
