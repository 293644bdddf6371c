#pragma once

#include "qgen/backend/client.hpp"
#include "qgen/backend/protocol.hpp"

#include <cstdint>
#include <string>

namespace qgen::backend {

// Prompts sent to the visual question generation model. The answer step has
// no fixed prompt: the generated question itself is fed back to the model.
struct VqgPrompts {
  std::string describe;
  std::string ask;
  std::string answer_mode;
};

const VqgPrompts& vqg_prompts();

inline constexpr int kEmbedDim = 64;

// Deterministic stand-in for every model role; a pure function of its
// arguments. Templates are deliberately transparent (the answer is the first
// sentence of the context) so end-to-end assertions can be exact.
// Optional "variant" on qa/boolq selects the n-th ranked keyword so several
// distinct candidates can be drawn for the same context.
// Throws ProtocolError for an invalid payload.
json mock_respond(Op op, const json& payload, std::uint64_t seed);
json mock_respond(std::string_view op, const json& payload, std::uint64_t seed);

class MockTransport : public Transport {
 public:
  explicit MockTransport(std::uint64_t seed) : seed_(seed) {}
  json send(const Envelope& env) override { return mock_respond(env.op, env.payload, seed_); }

 private:
  std::uint64_t seed_;
};

}  // namespace qgen::backend
