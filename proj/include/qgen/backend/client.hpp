#pragma once

#include "qgen/backend/protocol.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qgen::backend {

struct BackendConfig {
  enum class Mode { remote, mock };

  Mode mode = Mode::mock;
  std::string base_url;
  double timeout_s = 30.0;
  int retries = 2;
  double backoff_base_s = 0.5;  // sleep before retry i (0-based) = base * 2^i
  std::uint64_t seed = 0;       // mock mode only

  void validate() const;  // throws ValidationError
};

// Delivers one request. Throws TransportError for failures worth retrying,
// RemoteError / MalformedResponse for everything else.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual json send(const Envelope& env) = 0;
};

struct ClientMetrics {
  std::uint64_t calls = 0;
  std::uint64_t attempts = 0;
  std::uint64_t retries = 0;
  std::uint64_t failures = 0;
};

struct QaPair {
  std::string question;
  std::string answer;
};

struct BoolQuestion {
  std::string question;
  bool answer = false;
};

struct Classification {
  std::string label;  // "diagram" | "none"
  double confidence = 0.0;
};

enum class VqgMode { describe, ask, answer };

struct TimedSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

// Typed client over a Transport. Safe for concurrent use as long as the
// transport is; the bundled transports are stateless.
class BackendClient {
 public:
  using Sleeper = std::function<void(double seconds)>;

  explicit BackendClient(const BackendConfig& config);
  BackendClient(std::shared_ptr<Transport> transport, int retries, double backoff_base_s,
                Sleeper sleeper = {});

  // Validates the request, sends it with retries on TransportError, then
  // validates the response against the op's schema.
  json invoke(const Envelope& env);
  json invoke(Op op, json payload) { return invoke(make_envelope(op, std::move(payload))); }

  QaPair qa(const std::string& context, int variant = 0);
  std::vector<std::string> distractors(const std::string& context, const std::string& question,
                                       const std::string& answer, int n);
  BoolQuestion boolq(const std::string& context, int variant = 0);
  Classification classify(const std::string& image_ref);
  std::string vqg(const std::string& image_ref, VqgMode mode,
                  const std::optional<std::string>& question = std::nullopt);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);
  std::vector<TimedSegment> transcribe(const std::string& audio_ref);
  double reward(const std::string& context, const std::string& question, const std::string& answer);

  ClientMetrics metrics() const;

 private:
  std::shared_ptr<Transport> transport_;
  int retries_;
  double backoff_base_s_;
  Sleeper sleeper_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> attempts_{0};
  std::atomic<std::uint64_t> retry_count_{0};
  std::atomic<std::uint64_t> failures_{0};
};

std::shared_ptr<Transport> make_transport(const BackendConfig& config);

}  // namespace qgen::backend
