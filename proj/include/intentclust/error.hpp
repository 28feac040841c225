#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace intentclust {

/// Base of every error raised by the library. Callers that only need to
/// report a failure can catch this; the subclasses carry the detail.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// corpus

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error("malformed record at line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MixedLabeling : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// backends

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class ContextOverflow : public Error {
 public:
  using Error::Error;
};

// embeddings

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class EmptyTokenization : public Error {
 public:
  using Error::Error;
};

// index / llm

class MOutOfRange : public Error {
 public:
  using Error::Error;
};

class FormatViolation : public Error {
 public:
  using Error::Error;
};

class EmptyLabel : public Error {
 public:
  using Error::Error;
};

// clustering / evaluation

class KTooLarge : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

}  // namespace intentclust
