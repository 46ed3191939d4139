#pragma once

#include <doctest.h>

#include <functional>

#include "compmodel/error.hpp"

namespace testsupport {

// Kind of the ModelError raised by f; fails the test if nothing is thrown.
inline compmodel::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const compmodel::ModelError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return compmodel::ErrorKind::InvalidArgument;
}

}  // namespace testsupport
