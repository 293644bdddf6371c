#include "qgen/backend/http.hpp"

#include "qgen/backend/mock.hpp"

#include <httplib.h>

#include <cmath>
#include <thread>

namespace qgen::backend {

namespace {

std::pair<time_t, time_t> split_seconds(double s) {
  const auto whole = static_cast<time_t>(std::floor(s));
  const auto micros = static_cast<time_t>(std::llround((s - static_cast<double>(whole)) * 1e6));
  return {whole, micros};
}

json error_body(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

HttpTransport::HttpTransport(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

json HttpTransport::send(const Envelope& env) {
  const std::string op(to_string(env.op));
  httplib::Client cli(base_url_);
  const auto [sec, usec] = split_seconds(timeout_s_);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);

  httplib::Headers headers{{"X-Request-Id", env.request_id}};
  auto res = cli.Post("/" + env.version + "/" + op, headers, env.payload.dump(), "application/json");
  if (!res) throw TransportError(op, "transport failure: " + httplib::to_string(res.error()));

  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error&) {
    if (res->status >= 400) {
      throw RemoteError(op, "http_" + std::to_string(res->status), res->body, res->status);
    }
    throw MalformedResponse(op, "<body>", "is not valid JSON");
  }
  if (res->status >= 400) {
    if (body.is_object() && body.contains("error") && body["error"].is_object()) {
      const json& e = body["error"];
      throw RemoteError(op, e.value("code", "unknown"), e.value("message", ""), res->status);
    }
    throw RemoteError(op, "http_" + std::to_string(res->status), res->body, res->status);
  }
  if (res->get_header_value("X-Request-Id") != env.request_id) {
    throw MalformedResponse(op, "request_id", "was not echoed");
  }
  return body;
}

struct MockBackendServer::Impl {
  std::uint64_t seed;
  httplib::Server server;
  std::thread thread;
};

MockBackendServer::MockBackendServer(std::uint64_t seed) : impl_(std::make_unique<Impl>()) {
  impl_->seed = seed;
  impl_->server.Post(R"(/v1/([a-z_]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string op_name = req.matches[1];
    res.set_header("X-Request-Id", req.get_header_value("X-Request-Id"));
    Op op;
    try {
      op = op_from_string(op_name);
    } catch (const ProtocolError& e) {
      res.status = 404;
      res.set_content(error_body("unknown_op", e.what()).dump(), "application/json");
      return;
    }
    json payload;
    try {
      payload = json::parse(req.body);
    } catch (const json::parse_error& e) {
      res.status = 400;
      res.set_content(error_body("bad_json", e.what()).dump(), "application/json");
      return;
    }
    try {
      res.set_content(mock_respond(op, payload, impl_->seed).dump(), "application/json");
    } catch (const ProtocolError& e) {
      res.status = 400;
      res.set_content(error_body("bad_request", e.what()).dump(), "application/json");
    }
  });
}

MockBackendServer::~MockBackendServer() { stop(); }

int MockBackendServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void MockBackendServer::listen() { impl_->server.listen_after_bind(); }

void MockBackendServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void MockBackendServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace qgen::backend
