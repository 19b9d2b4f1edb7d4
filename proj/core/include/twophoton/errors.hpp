#pragma once

#include <stdexcept>
#include <string>

namespace twophoton {

// Malformed or inconsistent user input (units, files, keys).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed form was requested outside the parameter range where it holds.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The computation itself cannot proceed (all-zero fields, resource guards).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twophoton
