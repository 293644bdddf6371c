#pragma once

#include "qgen/backend/client.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace qgen::backend {

// POST <base_url>/v1/<op> with the payload as the JSON body and the request
// id in X-Request-Id, which the server must echo.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_s);
  json send(const Envelope& env) override;

 private:
  std::string base_url_;
  double timeout_s_;
};

// Serves mock_respond over the v1 HTTP protocol.
class MockBackendServer {
 public:
  explicit MockBackendServer(std::uint64_t seed);
  ~MockBackendServer();
  MockBackendServer(const MockBackendServer&) = delete;
  MockBackendServer& operator=(const MockBackendServer&) = delete;

  // Binds to a free port when port == 0; returns the bound port.
  int bind(const std::string& host, int port = 0);
  void listen();  // blocks until stop()
  void start();   // listen() on a background thread
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qgen::backend
