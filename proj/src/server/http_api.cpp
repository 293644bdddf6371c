#include "qgen/server/http_api.hpp"

#include "qgen/backend/protocol.hpp"

#include <httplib.h>

#include <filesystem>
#include <thread>

namespace qgen::server {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

ojson error_body(const std::string& code, const std::string& message) {
  ojson e;
  e["code"] = code;
  e["message"] = message;
  ojson j;
  j["error"] = std::move(e);
  return j;
}

// Maps library errors to HTTP responses. validation_status is 400 for
// malformed input and 422 for well-formed input that breaks a rule.
void send_error(httplib::Response& res, int validation_status) {
  try {
    throw;
  } catch (const IngestError& e) {
    ojson body = error_body("bad_document", e.what());
    if (e.record_index()) {
      body["error"]["record"] = *e.record_index();
      body["error"]["line"] = *e.record_index() + 1;
    }
    if (e.byte_offset()) body["error"]["byte_offset"] = *e.byte_offset();
    send_json(res, 400, body);
  } catch (const ConflictError& e) {
    ojson body = error_body("duplicate", e.what());
    body["error"]["id"] = e.existing_id();
    body["id"] = e.existing_id();
    send_json(res, 409, body);
  } catch (const NotFoundError& e) {
    send_json(res, 404, error_body("not_found", e.what()));
  } catch (const backend::BackendError& e) {
    ojson body = error_body("backend_failure", e.what());
    body["error"]["op"] = e.op();
    send_json(res, 502, body);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::alignment:
        send_json(res, validation_status, error_body("invalid", e.what()));
        break;
      default:
        send_json(res, 500, error_body(to_string(e.kind()), e.what()));
    }
  } catch (const nlohmann::json::exception& e) {
    send_json(res, validation_status, error_body("invalid", e.what()));
  } catch (const std::exception& e) {
    send_json(res, 500, error_body("internal", e.what()));
  }
}

ojson parse_body(const httplib::Request& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return ojson::object();
  try {
    return ojson::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string image_content_type(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

// Quiz JSON without keys; visual items whose image was stored with the
// document gain an image_url served by the images route.
ojson quiz_body(Service& service, const qforge::Quiz& quiz) {
  ojson body = qforge::to_json(quiz, /*include_keys=*/false);
  bool any_visual = false;
  for (const auto& it : quiz.items) any_visual = any_visual || it.qtype == qforge::QType::visual;
  if (!any_visual) return body;
  const auto doc = service.store().load_document(quiz.doc_id);
  const auto images = service.store().document_dir(quiz.doc_id) / "images";
  for (std::size_t i = 0; i < quiz.items.size(); ++i) {
    const auto& it = quiz.items[i];
    if (it.qtype != qforge::QType::visual || it.source_chunks.empty()) continue;
    const auto* chunk = doc.find_chunk(it.source_chunks[0]);
    if (chunk == nullptr || chunk->image_ref.empty()) continue;
    const std::string name = std::filesystem::path(chunk->image_ref).filename().string();
    if (!std::filesystem::is_regular_file(images / name)) continue;
    body["items"][i]["image_url"] = "/api/documents/" + quiz.doc_id + "/images/" + name;
  }
  return body;
}

}  // namespace

struct HttpApi::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {}
  void routes();
};

void HttpApi::Impl::routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  server.Post("/api/documents", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const UploadFormat fmt = req.has_param("format")
                                   ? upload_format_from_string(req.get_param_value("format"))
                                   : UploadFormat::detect;
      const UploadResult r =
          service.upload(req.body, fmt, req.has_param("title") ? req.get_param_value("title") : "");
      ojson body;
      body["id"] = r.doc_id;
      body["chunk_count"] = r.chunk_count;
      send_json(res, 201, body);
    } catch (...) {
      send_error(res, 400);
    }
  });

  server.Get("/api/documents", [this](const httplib::Request&, httplib::Response& res) {
    try {
      ojson list = ojson::array();
      for (const auto& id : service.store().list_documents()) {
        const auto doc = service.store().load_document(id);
        ojson d;
        d["id"] = id;
        d["kind"] = chunkstore::to_string(doc.document.kind);
        d["title"] = doc.document.title;
        d["chunk_count"] = doc.chunks.size();
        list.push_back(std::move(d));
      }
      send_json(res, 200, list);
    } catch (...) {
      send_error(res, 400);
    }
  });

  server.Get(R"(/api/documents/([^/]+)/images/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               try {
                 const std::string doc_id = req.matches[1];
                 const std::string name = req.matches[2];
                 if (name == "." || name == "..") throw NotFoundError("no such image");
                 if (!service.store().has_document(doc_id)) throw NotFoundError("unknown document " + doc_id);
                 const auto path = service.store().document_dir(doc_id) / "images" / name;
                 if (!std::filesystem::is_regular_file(path)) throw NotFoundError("no such image " + name);
                 res.status = 200;
                 res.set_content(chunkstore::read_file(path), image_content_type(path));
               } catch (...) {
                 send_error(res, 400);
               }
             });

  server.Post(R"(/api/documents/([^/]+)/quizzes)",
              [this](const httplib::Request& req, httplib::Response& res) {
                try {
                  const std::string doc_id = req.matches[1];
                  const qforge::GenerationSpec spec = service.spec_with_defaults(parse_body(req));
                  const qforge::Quiz quiz = service.generate(doc_id, spec);
                  send_json(res, 200, quiz_body(service, quiz));
                } catch (...) {
                  send_error(res, 400);
                }
              });

  server.Get(R"(/api/quizzes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, quiz_body(service, service.get_quiz(req.matches[1])));
    } catch (...) {
      send_error(res, 400);
    }
  });

  server.Post(R"(/api/quizzes/([^/]+)/submission)",
              [this](const httplib::Request& req, httplib::Response& res) {
                try {
                  const ojson body = parse_body(req);
                  if (!body.is_object()) throw SubmissionError("submission must be a JSON object");
                  const ojson answers = body.contains("answers") ? body["answers"] : ojson::object();
                  send_json(res, 200, to_json(service.submit(req.matches[1], answers)));
                } catch (...) {
                  send_error(res, 422);
                }
              });

  server.Post(R"(/api/questions/([^/]+)/rating)",
              [this](const httplib::Request& req, httplib::Response& res) {
                try {
                  const ojson body = parse_body(req);
                  if (!body.is_object() || !body.contains("stars") ||
                      !body["stars"].is_number_integer()) {
                    throw ValidationError("'stars' must be an integer from 1 to 5");
                  }
                  const std::string session =
                      body.contains("session") && body["session"].is_string()
                          ? body["session"].get<std::string>()
                          : std::string();
                  const auto stars = body["stars"].get<long long>();
                  if (stars < feedback::kMinRating || stars > feedback::kMaxRating) {
                    throw ValidationError("'stars' must be an integer from 1 to 5");
                  }
                  service.rate(req.matches[1], static_cast<int>(stars), session);
                  res.status = 204;
                } catch (...) {
                  send_error(res, 422);
                }
              });

  server.Get("/api/feedback/export", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      std::size_t min = 0;
      if (req.has_param("min")) min = std::stoul(req.get_param_value("min"));
      const feedback::ExportResult out = service.export_feedback(min);
      if (out.warning) res.set_header("X-Qgen-Warning", *out.warning);
      res.status = 200;
      res.set_content(out.ndjson, "application/x-ndjson");
    } catch (const std::logic_error&) {
      send_json(res, 400, error_body("invalid", "'min' must be a non-negative integer"));
    } catch (...) {
      send_error(res, 400);
    }
  });

  server.Get("/api/feedback/stats", [this](const httplib::Request&, httplib::Response& res) {
    try {
      send_json(res, 200, feedback::to_json(service.feedback_stats()));
    } catch (...) {
      send_error(res, 400);
    }
  });
}

HttpApi::HttpApi(Service& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpApi::listen() { impl_->server.listen_after_bind(); }

void HttpApi::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpApi::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace qgen::server
