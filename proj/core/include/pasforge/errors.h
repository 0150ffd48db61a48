#ifndef PASFORGE_ERRORS_H_
#define PASFORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pasforge {

// Malformed input text. Carries the 1-based location of the first problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, int column,
             const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Well-formed input that violates a structural invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoints, feature indexes and ensemble members that cannot be combined.
class IncompatibleModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pasforge

#endif  // PASFORGE_ERRORS_H_
