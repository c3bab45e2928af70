#pragma once

#include <stdexcept>
#include <string>

namespace tirs {

// Malformed or invariant-violating input data (files, schedules, requests).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that reference each other inconsistently (trips naming unknown
// segments, segments naming unknown requests, ...).
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tirs
