#pragma once

#include "qgen/common/error.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>

namespace qgen::backend {

using json = nlohmann::json;

// The eight model roles behind the v1 wire protocol.
enum class Op { qa, distractors, boolq, classify, vqg, embed, transcribe, reward };

inline constexpr std::array<Op, 8> kAllOps = {Op::qa,    Op::distractors, Op::boolq,
                                             Op::classify, Op::vqg,       Op::embed,
                                             Op::transcribe, Op::reward};

std::string_view to_string(Op op);
Op op_from_string(std::string_view name);  // throws ProtocolError

inline constexpr std::string_view kProtocolVersion = "v1";

struct Envelope {
  Op op = Op::qa;
  std::string version{kProtocolVersion};
  json payload = json::object();
  std::string request_id;

  bool operator==(const Envelope&) const = default;
};

std::string new_request_id();
Envelope make_envelope(Op op, json payload);

// Canonical wire form: a JSON object with sorted keys and no whitespace.
std::string encode(const Envelope& env);
Envelope decode(std::string_view bytes);  // throws ProtocolError

class BackendError : public Error {
 public:
  BackendError(std::string op, const std::string& message)
      : Error(ErrorKind::backend, message), op_(std::move(op)) {}
  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

// Unknown op, wrong version or a request payload that violates its schema.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message) : Error(ErrorKind::validation, message) {}
};

// One failed attempt at the transport level (timeout, refused connection).
// The client retries these.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TimeoutAfterRetries : public BackendError {
 public:
  TimeoutAfterRetries(std::string op, int attempts, const std::string& last_error)
      : BackendError(op, "backend op '" + op + "' failed after " + std::to_string(attempts) +
                             " attempts: " + last_error),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class MalformedResponse : public BackendError {
 public:
  MalformedResponse(std::string op, std::string field, const std::string& why)
      : BackendError(op, "malformed '" + op + "' response: field '" + field + "' " + why),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The backend answered with {"error":{"code","message"}}.
class RemoteError : public BackendError {
 public:
  RemoteError(std::string op, std::string code, std::string message, int http_status)
      : BackendError(op, "backend op '" + op + "' returned error " + code + ": " + message),
        code_(std::move(code)),
        remote_message_(std::move(message)),
        http_status_(http_status) {}
  const std::string& code() const noexcept { return code_; }
  const std::string& remote_message() const noexcept { return remote_message_; }
  int http_status() const noexcept { return http_status_; }

 private:
  std::string code_;
  std::string remote_message_;
  int http_status_;
};

// Schema checks for each op. Requests throw ProtocolError, responses throw
// MalformedResponse naming the offending field.
void validate_request(Op op, const json& payload);
void validate_response(Op op, const json& request, const json& response);

}  // namespace qgen::backend
