#pragma once

#include <stdexcept>
#include <string>

namespace shotcount {

/// Malformed input: bad files, bad flags, unparsable text.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A precondition was violated (dimension mismatch, bad allocation, ...).
class precondition_error : public std::runtime_error {
 public:
  explicit precondition_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// A numerical self-consistency check failed (negative masses, frame
/// mismatch, imaginary parts that should have cancelled).
class consistency_error : public std::runtime_error {
 public:
  explicit consistency_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace shotcount
