#pragma once

#include <stdexcept>
#include <string>

namespace finslerlab {

// Every failure raised by the library derives from Error so callers can
// catch one type; the subclasses carry the failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {  // point outside chart box or fiber floor
 public:
  using Error::Error;
};

class OrderOverflow : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class InvalidMetric : public Error {  // constructor contract violated
 public:
  using Error::Error;
};

class IndefiniteMetric : public Error {
 public:
  using Error::Error;
};

class DegenerateFlag : public Error {
 public:
  using Error::Error;
};

class ChartExit : public Error {
 public:
  ChartExit(const std::string& what, double last_t) : Error(what), last_valid_t(last_t) {}
  double last_valid_t;
};

class ConventionMismatch : public Error {  // identity check that pins a convention failed
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace finslerlab
