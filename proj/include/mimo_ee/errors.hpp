// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mimo_ee {

/// Bad user input: unparsable files, invariant violations, invalid CLI
/// arguments. Maps to process exit code 2.
class input_error : public std::runtime_error {
  public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Solver failure: non-convergence or an infeasible problem. Maps to
/// process exit code 1.
class solver_error : public std::runtime_error {
  public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mimo_ee
