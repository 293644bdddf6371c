#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qgen {

enum class ErrorKind {
  validation,
  not_found,
  conflict,
  io,
  backend,
  alignment,
};

const char* to_string(ErrorKind kind);

// Root of every error thrown by the library. The kind drives CLI exit codes
// and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message)
      : Error(ErrorKind::not_found, message) {}
};

class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, std::string existing_id)
      : Error(ErrorKind::conflict, message), existing_id_(std::move(existing_id)) {}

  const std::string& existing_id() const noexcept { return existing_id_; }

 private:
  std::string existing_id_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

// Raised while ingesting. Carries the failing manifest record (0-based) or the
// byte offset of an invalid UTF-8 sequence, whichever applies.
class IngestError : public Error {
 public:
  IngestError(const std::string& message, std::optional<std::size_t> record_index,
              std::optional<std::size_t> byte_offset = std::nullopt)
      : Error(ErrorKind::validation, message),
        record_index_(record_index),
        byte_offset_(byte_offset) {}

  std::optional<std::size_t> record_index() const noexcept { return record_index_; }
  std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  std::optional<std::size_t> record_index_;
  std::optional<std::size_t> byte_offset_;
};

}  // namespace qgen
