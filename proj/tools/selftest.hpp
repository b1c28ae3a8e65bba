#pragma once

#include <iosfwd>

namespace becq::cli {

// Quick invariant checks over every module; one line per check.
bool run_selftest(std::ostream& report);

}  // namespace becq::cli
