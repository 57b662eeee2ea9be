#pragma once

#include <stdexcept>
#include <string>

namespace hrc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or record. `where` names the record/line.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Raised by the belief filter when every type assigns zero likelihood.
class ImpossibleObservation : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace hrc
