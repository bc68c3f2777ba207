#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridflow {

// Base for every error raised by the library. `kind()` is a stable short tag
// that the CLI reports in its machine-readable error line.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    virtual char const* kind() const noexcept { return "error"; }
};

class ParseError : public Error {
  public:
    ParseError(std::string const& message, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    char const* kind() const noexcept override { return "parse"; }

  private:
    std::size_t line_;
};

class ValidationError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "validation"; }
};

class PreconditionError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "precondition"; }
};

class SolverError : public Error {
  public:
    SolverError(std::string const& message, int iteration)
        : Error(message + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }
    char const* kind() const noexcept override { return "solver"; }

  private:
    int iteration_;
};

class ShapeError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "shape"; }
};

class GenerationError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "generation"; }
};

class ConfigError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "config"; }
};

class TrainingError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "training"; }
};

class IoError : public Error {
  public:
    using Error::Error;
    char const* kind() const noexcept override { return "io"; }
};

}  // namespace gridflow
