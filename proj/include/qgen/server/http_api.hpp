#pragma once

#include "qgen/server/service.hpp"

#include <memory>
#include <string>

namespace qgen::server {

// REST surface:
//   POST /api/documents                    body: manifest JSON-Lines or plain text
//                                          ?format=manifest|text&title=...
//                                          201 {id, chunk_count}; 400; 409 {error, id}
//   GET  /api/documents                    200 [{id, kind, title, chunk_count}]
//   GET  /api/documents/{id}/images/{name} 200 image bytes; 404
//   POST /api/documents/{id}/quizzes       body: GenerationSpec; 200 quiz without keys;
//                                          400; 404; 502 {error.op}
//   GET  /api/quizzes/{id}                 200 quiz without keys; 404
//                                          Visual items with a stored image carry image_url.
//   POST /api/quizzes/{id}/submission      {answers: {...}}; 200 GradeReport; 404; 422
//   POST /api/questions/{id}/rating        {stars, session}; 204; 404; 422
//   GET  /api/feedback/export?min=N        200 application/x-ndjson
//   GET  /api/feedback/stats               200 FeedbackStats
// Errors are {"error": {"code", "message", ...}}.
class HttpApi {
 public:
  explicit HttpApi(Service& service);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Binds to a free port when port == 0; returns the bound port.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void start();   // listen() on a background thread
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qgen::server
