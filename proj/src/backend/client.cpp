#include "qgen/backend/client.hpp"

#include "qgen/backend/http.hpp"
#include "qgen/backend/mock.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace qgen::backend {

void BackendConfig::validate() const {
  if (retries < 0) throw ValidationError("backend retries must be >= 0");
  if (!(timeout_s > 0.0)) throw ValidationError("backend timeout_s must be > 0");
  if (backoff_base_s < 0.0) throw ValidationError("backend backoff must be >= 0");
  if (mode == Mode::remote && base_url.empty()) throw ValidationError("remote backend needs base_url");
}

std::shared_ptr<Transport> make_transport(const BackendConfig& config) {
  config.validate();
  if (config.mode == BackendConfig::Mode::mock) return std::make_shared<MockTransport>(config.seed);
  return std::make_shared<HttpTransport>(config.base_url, config.timeout_s);
}

BackendClient::BackendClient(const BackendConfig& config)
    : BackendClient(make_transport(config), config.retries, config.backoff_base_s) {}

BackendClient::BackendClient(std::shared_ptr<Transport> transport, int retries,
                             double backoff_base_s, Sleeper sleeper)
    : transport_(std::move(transport)),
      retries_(retries),
      backoff_base_s_(backoff_base_s),
      sleeper_(std::move(sleeper)) {
  if (retries_ < 0) throw ValidationError("backend retries must be >= 0");
  if (!sleeper_) {
    sleeper_ = [](double s) {
      std::this_thread::sleep_for(std::chrono::duration<double>(s));
    };
  }
}

json BackendClient::invoke(const Envelope& env) {
  if (env.version != kProtocolVersion) throw ProtocolError("unsupported version '" + env.version + "'");
  validate_request(env.op, env.payload);
  ++calls_;
  const std::string op(to_string(env.op));
  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) {
      ++retry_count_;
      sleeper_(backoff_base_s_ * std::ldexp(1.0, attempt - 1));
    }
    ++attempts_;
    json response;
    try {
      response = transport_->send(env);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    } catch (...) {
      ++failures_;
      throw;
    }
    try {
      validate_response(env.op, env.payload, response);
    } catch (...) {
      ++failures_;
      throw;
    }
    return response;
  }
  ++failures_;
  throw TimeoutAfterRetries(op, retries_ + 1, last_error);
}

QaPair BackendClient::qa(const std::string& context, int variant) {
  json p{{"context", context}};
  if (variant > 0) p["variant"] = variant;
  const json r = invoke(Op::qa, std::move(p));
  return {r["question"].get<std::string>(), r["answer"].get<std::string>()};
}

std::vector<std::string> BackendClient::distractors(const std::string& context,
                                                    const std::string& question,
                                                    const std::string& answer, int n) {
  const json r = invoke(Op::distractors,
                        {{"context", context}, {"question", question}, {"answer", answer}, {"n", n}});
  return r["distractors"].get<std::vector<std::string>>();
}

BoolQuestion BackendClient::boolq(const std::string& context, int variant) {
  json p{{"context", context}};
  if (variant > 0) p["variant"] = variant;
  const json r = invoke(Op::boolq, std::move(p));
  return {r["question"].get<std::string>(), r["answer"].get<bool>()};
}

Classification BackendClient::classify(const std::string& image_ref) {
  const json r = invoke(Op::classify, {{"image_ref", image_ref}});
  return {r["label"].get<std::string>(), r["confidence"].get<double>()};
}

std::string BackendClient::vqg(const std::string& image_ref, VqgMode mode,
                               const std::optional<std::string>& question) {
  json p{{"image_ref", image_ref}};
  switch (mode) {
    case VqgMode::describe:
      p["mode"] = "describe";
      p["prompt"] = vqg_prompts().describe;
      break;
    case VqgMode::ask:
      p["mode"] = "ask";
      p["prompt"] = vqg_prompts().ask;
      break;
    case VqgMode::answer:
      p["mode"] = "answer";
      p["question"] = question.value_or("");
      p["prompt"] = question.value_or("");
      break;
  }
  return invoke(Op::vqg, std::move(p))["text"].get<std::string>();
}

std::vector<std::vector<double>> BackendClient::embed(const std::vector<std::string>& texts) {
  const json r = invoke(Op::embed, {{"texts", texts}});
  return r["vectors"].get<std::vector<std::vector<double>>>();
}

std::vector<TimedSegment> BackendClient::transcribe(const std::string& audio_ref) {
  const json r = invoke(Op::transcribe, {{"audio_ref", audio_ref}});
  std::vector<TimedSegment> out;
  for (const auto& s : r["segments"]) {
    out.push_back({s["start_s"].get<double>(), s["end_s"].get<double>(), s["text"].get<std::string>()});
  }
  return out;
}

double BackendClient::reward(const std::string& context, const std::string& question,
                             const std::string& answer) {
  const json r =
      invoke(Op::reward, {{"context", context}, {"question", question}, {"answer", answer}});
  return r["score"].get<double>();
}

ClientMetrics BackendClient::metrics() const {
  return {calls_.load(), attempts_.load(), retry_count_.load(), failures_.load()};
}

}  // namespace qgen::backend
