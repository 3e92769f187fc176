#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace datalearner {

/// Malformed ARFF input. The message always carries "line N".
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A request that cannot run: bad parameters, wrong attribute kinds, out-of-range indices.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure raised while an algorithm is training or predicting.
class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown from a checkpoint once cancellation has been requested.
class Cancelled : public std::exception {
public:
  const char* what() const noexcept override { return "cancelled"; }
};

}  // namespace datalearner
