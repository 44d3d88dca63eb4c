#ifndef STARBDI_ERRORS_HPP
#define STARBDI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace starbdi {

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// A truncated series or iteration hit its term cap before the stopping
// rule was satisfied.
struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

// An exact-rational computation that must produce an integer did not.
struct IntegralityError : std::logic_error {
  explicit IntegralityError(const std::string& msg) : std::logic_error(msg) {}
};

// Non-finite kernel value on a Volterra grid.
struct SingularKernel : std::runtime_error {
  explicit SingularKernel(const std::string& msg) : std::runtime_error(msg) {}
};

// A simulated path exceeded the machine-integer level guard.
struct LevelOverflow : std::runtime_error {
  explicit LevelOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace starbdi

#endif
