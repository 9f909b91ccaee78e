#pragma once

#include <stdexcept>
#include <string>

namespace corrobust {

// Malformed or inconsistent input records.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Filesystem or codec failure while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corrobust
