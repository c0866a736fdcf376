#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pesel {

enum class ErrorKind {
  Ingest,
  Parse,
  Domain,
  LinAlg,
  DegenerateData,
  SpikeBelowNoise,
  DegenerateSignal,
  Io,
  Config,
};

// Base of every library error. The kind drives the C API status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IngestError : public Error {
 public:
  explicit IngestError(const std::string& what) : Error(ErrorKind::Ingest, what) {}
};

// Cell-level parse failure; row and column are 1-based file coordinates.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(ErrorKind::Parse, what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class LinAlgError : public Error {
 public:
  explicit LinAlgError(const std::string& what) : Error(ErrorKind::LinAlg, what) {}
};

class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& what) : Error(ErrorKind::DegenerateData, what) {}
};

class SpikeBelowNoiseError : public Error {
 public:
  explicit SpikeBelowNoiseError(const std::string& what) : Error(ErrorKind::SpikeBelowNoise, what) {}
};

class DegenerateSignalError : public Error {
 public:
  explicit DegenerateSignalError(const std::string& what) : Error(ErrorKind::DegenerateSignal, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace pesel
