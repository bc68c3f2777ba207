#pragma once

#include "gridflow/common/error.hpp"

namespace gridflow::cli {

// Bad invocation: exit code 2.
class UsageError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "usage"; }
};

}  // namespace gridflow::cli
