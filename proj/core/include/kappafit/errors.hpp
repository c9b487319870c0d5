#pragma once

#include <stdexcept>
#include <string>

namespace kappafit {

// Invalid strategy/run configuration (bad dimensions, inconsistent bounds).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (database rows, hypothesis/seed tables).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures while reading or writing artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kappafit
