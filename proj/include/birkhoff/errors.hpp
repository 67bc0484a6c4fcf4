#pragma once

#include <stdexcept>
#include <string>

namespace birkhoff {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define BIRKHOFF_DEFINE_ERROR(Name)                                           \
  class Name : public Error {                                                 \
  public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}      \
  }

BIRKHOFF_DEFINE_ERROR(ParseError);
BIRKHOFF_DEFINE_ERROR(EmptyWindow);
BIRKHOFF_DEFINE_ERROR(TruncationError);
BIRKHOFF_DEFINE_ERROR(UnknownVariable);
BIRKHOFF_DEFINE_ERROR(InvalidStratum);
BIRKHOFF_DEFINE_ERROR(InconsistentTruncation);
BIRKHOFF_DEFINE_ERROR(WindowExceeded);
BIRKHOFF_DEFINE_ERROR(IndexBelowStratum);
BIRKHOFF_DEFINE_ERROR(DegenerateMetric);
BIRKHOFF_DEFINE_ERROR(InvalidFlow);
BIRKHOFF_DEFINE_ERROR(GridError);
BIRKHOFF_DEFINE_ERROR(PastCatastrophe);
BIRKHOFF_DEFINE_ERROR(NoBlowupDetected);
BIRKHOFF_DEFINE_ERROR(ConfigError);
BIRKHOFF_DEFINE_ERROR(ComplexRoots);
BIRKHOFF_DEFINE_ERROR(VacuumState);
BIRKHOFF_DEFINE_ERROR(CFLViolation);
BIRKHOFF_DEFINE_ERROR(RootFindDiverged);
BIRKHOFF_DEFINE_ERROR(ShapeMismatch);
BIRKHOFF_DEFINE_ERROR(JetDepthExceeded);

#undef BIRKHOFF_DEFINE_ERROR

}  // namespace birkhoff
