#pragma once

#include <stdexcept>
#include <string>

namespace ccl {

// Every failure raised by the library derives from Error so front ends can
// map the whole family onto one exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define CCL_DEFINE_ERROR(Name, tag)                      \
  class Name : public Error {                            \
   public:                                               \
    using Error::Error;                                  \
    const char* kind() const noexcept override { return tag; } \
  };

CCL_DEFINE_ERROR(InputError, "input-error")
CCL_DEFINE_ERROR(UnsupportedOperation, "unsupported-operation")
CCL_DEFINE_ERROR(HypothesisError, "hypothesis-error")
CCL_DEFINE_ERROR(ZeroProbabilityError, "zero-probability-conditioning")
CCL_DEFINE_ERROR(BudgetError, "budget-exceeded")
CCL_DEFINE_ERROR(OutOfScopeError, "out-of-scope")
CCL_DEFINE_ERROR(InternalError, "internal-error")

#undef CCL_DEFINE_ERROR

}  // namespace ccl
