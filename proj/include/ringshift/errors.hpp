#pragma once

#include <stdexcept>
#include <string>

namespace ringshift {

/// Operands disagree on width or height.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Operands live in different residue rings, or a modulus is unusable.
class ModulusError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace ringshift
