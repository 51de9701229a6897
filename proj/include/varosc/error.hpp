#ifndef VAROSC_ERROR_HPP
#define VAROSC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace varosc {

/// Bad argument to a library routine (violated precondition).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative procedure failed: optimizer did not converge, eigensolver
/// broke down, or a basis turned out to be under-resolved.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace varosc

#endif // VAROSC_ERROR_HPP
