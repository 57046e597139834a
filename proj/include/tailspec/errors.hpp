#pragma once

#include <stdexcept>
#include <string>

namespace tailspec {

// Bad input: malformed data, violated preconditions, unreadable files.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The data are well formed but the requested quantity does not exist or
// could not be computed (degenerate sample, infeasible constraint, no
// convergence).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tailspec
