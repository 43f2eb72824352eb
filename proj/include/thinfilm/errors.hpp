#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

/// Base class for every failure reported by the library. `code()` is a
/// stable identifier used by the command-line tool and by sweep scripts.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define THINFILM_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

// polynomial root isolation
THINFILM_DEFINE_ERROR(UnresolvedCluster)
// exponent algebra and positive solutions
THINFILM_DEFINE_ERROR(OutOfRange)
THINFILM_DEFINE_ERROR(NoPositiveSolution)
THINFILM_DEFINE_ERROR(NoConvergence)
// exact m = 1 construction
THINFILM_DEFINE_ERROR(MatchingFailure)
THINFILM_DEFINE_ERROR(RootCountMismatch)
// integration
THINFILM_DEFINE_ERROR(SingularState)
THINFILM_DEFINE_ERROR(StepUnderflow)
// periodic orbits
THINFILM_DEFINE_ERROR(NoSettling)
THINFILM_DEFINE_ERROR(NewtonDiverged)
THINFILM_DEFINE_ERROR(BracketInvalid)

#undef THINFILM_DEFINE_ERROR

}  // namespace thinfilm
