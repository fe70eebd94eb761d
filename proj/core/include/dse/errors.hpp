#pragma once

#include <stdexcept>
#include <string>

namespace dse {

/// Base of every error raised by the library. Callers that do not care
/// about the specific failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DSE_DECLARE_ERROR(Name)            \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// Input documents
DSE_DECLARE_ERROR(SchemaError);
DSE_DECLARE_ERROR(CycleError);
DSE_DECLARE_ERROR(DanglingEdgeError);
DSE_DECLARE_ERROR(EmptyGraphError);
DSE_DECLARE_ERROR(InvalidSpecError);

// Hardware / database
DSE_DECLARE_ERROR(MissingGppEntryError);
DSE_DECLARE_ERROR(MissingDatabaseEntryError);
DSE_DECLARE_ERROR(UnreachableError);
DSE_DECLARE_ERROR(InvalidDesignError);

// Simulation
DSE_DECLARE_ERROR(ZeroRateError);
DSE_DECLARE_ERROR(NoRunningTaskError);
DSE_DECLARE_ERROR(StepBudgetExceededError);
DSE_DECLARE_ERROR(SpaceTooLargeError);

// Exploration
DSE_DECLARE_ERROR(AllMetricsMetError);
DSE_DECLARE_ERROR(ExhaustedCandidatesError);
DSE_DECLARE_ERROR(NoApplicableMoveError);
DSE_DECLARE_ERROR(InfeasibleMoveError);
DSE_DECLARE_ERROR(EmptyTraceError);

#undef DSE_DECLARE_ERROR

}  // namespace dse
