#pragma once

#include <stdexcept>
#include <string>

namespace morpheus {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data file (lexicon, tag table, distribution, dataset line).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Bad user-supplied configuration; maps to exit code 1 in the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
  virtual bool retriable() const { return false; }
};

/// The oracle could not be reached or timed out. Safe to retry.
class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
  bool retriable() const override { return true; }
};

/// The oracle answered, but the answer violates the scoring protocol.
class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace morpheus
