#pragma once
#include <stdexcept>
#include <string>

namespace pecd {

//! Base of every library error; CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Malformed input file. `path` is a JSON-pointer-like field path.
class SchemaError : public Error {
public:
  SchemaError(const std::string &path, const std::string &what)
      : Error(path + ": " + what), path_(path) {}
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

//! Quadrature/propagation failed to converge (or envelope not decayed).
class ConvergenceError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace pecd
