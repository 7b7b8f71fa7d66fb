#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace litmap {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line (or record) number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// A provider could not answer one query.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or missing path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation called outside its domain (empty corpus, graph without edges, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; what() reads "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause) : Error(stage + ": " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace litmap
