#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfd {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotUnitaryError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : Error(what + " (after " + std::to_string(iterations) + " sweeps)"), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Circuit text that does not follow the grammar. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The faulty and fault-free outputs coincide up to a global phase for every input.
class UndetectableFault : public Error {
 public:
  UndetectableFault(std::size_t gate_index, const std::string& msg)
      : Error(msg), gate_index_(gate_index) {}
  std::size_t gate_index() const noexcept { return gate_index_; }

 private:
  std::size_t gate_index_;
};

// Table and circuit do not belong together.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfd
