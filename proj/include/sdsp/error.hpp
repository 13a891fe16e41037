#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdsp {

// Process exit codes: 1 for contract/config errors, 2 for numeric failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual int exit_code() const { return 1; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class DegenerateBasisError : public NumericError {
 public:
  DegenerateBasisError(std::size_t row, const std::string& msg)
      : NumericError(msg), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace sdsp
