#ifndef QLAX_ERRORS_HPP
#define QLAX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qlax {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// Singular corner block in an operator-valued triangular factorization.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlax

#endif  // QLAX_ERRORS_HPP
