#include "qgen/server/http_api.hpp"

#include "testutil.hpp"

#include <doctest.h>
#include <httplib.h>

using namespace qgen;
using namespace qgen::server;
using testutil::TempDir;

namespace {

struct Api {
  TempDir tmp;
  Service svc;
  HttpApi api;
  int port;
  httplib::Client cli;

  explicit Api(ServerConfig c) : svc(with_root(std::move(c), tmp.path())), api(svc), port(api.bind("127.0.0.1", 0)),
                                 cli("127.0.0.1", port) {
    REQUIRE(port > 0);
    api.start();
    cli.set_read_timeout(30, 0);
  }
  Api() : Api(mock_config()) {}

  static ServerConfig mock_config() {
    ServerConfig c;
    c.backend.seed = 42;
    return c;
  }
  static ServerConfig with_root(ServerConfig c, const std::filesystem::path& root) {
    c.store_root = root / "store";
    return c;
  }

  std::string upload_sample() {
    return svc.upload(testutil::sample_manifest(), UploadFormat::manifest, "bio", testutil::sample_dir()).doc_id;
  }

  ojson post(const std::string& path, const std::string& body, int expect) {
    auto r = cli.Post(path, body, "application/json");
    REQUIRE(r);
    CHECK(r->status == expect);
    return r->body.empty() ? ojson() : ojson::parse(r->body);
  }

  ojson get(const std::string& path, int expect) {
    auto r = cli.Get(path);
    REQUIRE(r);
    CHECK(r->status == expect);
    return r->body.empty() ? ojson() : ojson::parse(r->body);
  }
};

const char* kText = "Plants make sugar in leaves. Roots take up water from soil. Stems carry water upward.";

}  // namespace

TEST_CASE("http: upload, duplicate and bad manifest") {
  Api a;
  const auto up = a.post("/api/documents?format=text&title=plants", kText, 201);
  CHECK(up["id"].get<std::string>().size() > 0);
  CHECK(up["chunk_count"].get<int>() >= 1);

  const auto dup = a.post("/api/documents?format=text", kText, 409);
  CHECK(dup["id"] == up["id"]);
  CHECK(dup["error"]["code"] == "duplicate");

  const auto bad = a.post("/api/documents?format=manifest",
                          "{\"kind\":\"pdf\",\"page\":1,\"text\":\"ok\"}\n{\"kind\":\"pdf\"}\n", 400);
  CHECK(bad["error"]["code"] == "bad_document");
  CHECK(bad["error"]["line"] == 2);

  a.post("/api/documents?format=docx", kText, 400);

  const auto list = a.get("/api/documents", 200);
  REQUIRE(list.size() == 1);
  CHECK(list[0]["id"] == up["id"]);
  CHECK(list[0]["title"] == "plants");
  CHECK(list[0]["kind"] == "plaintext");
}

TEST_CASE("http: generate, fetch, submit and rate") {
  Api a;
  const std::string doc = a.upload_sample();
  const std::string spec = R"({"types":{"mcq":1,"truefalse":1,"fitb":1,"matching":1},"seed":5})";
  auto r = a.cli.Post("/api/documents/" + doc + "/quizzes", spec, "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body.find("answer_key") == std::string::npos);
  const auto quiz = ojson::parse(r->body);
  CHECK(quiz["items"].size() == 4);
  const std::string qid = quiz["id"];

  const auto fetched = a.get("/api/quizzes/" + qid, 200);
  CHECK(fetched == quiz);
  a.get("/api/quizzes/nope", 404);
  a.post("/api/documents/nope/quizzes", spec, 404);
  a.post("/api/documents/" + doc + "/quizzes", R"({"types":{"essay":1}})", 400);
  a.post("/api/documents/" + doc + "/quizzes", "{not json", 400);

  const auto stored = a.svc.get_quiz(qid);
  ojson answers = ojson::object();
  for (const auto& it : stored.items) std::visit([&](const auto& v) { answers[it.id] = v; }, it.answer_key);
  const auto graded = a.post("/api/quizzes/" + qid + "/submission", ojson{{"answers", answers}}.dump(), 200);
  CHECK(graded["score"] == 1.0);

  ojson wrong = ojson::object();
  wrong[stored.items[0].id] = "not an index";
  a.post("/api/quizzes/" + qid + "/submission", ojson{{"answers", wrong}}.dump(), 422);
  a.post("/api/quizzes/nope/submission", "{}", 404);

  const std::string item = stored.items[0].id;
  auto ok = a.cli.Post("/api/questions/" + item + "/rating", R"({"stars":4,"session":"s1"})", "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 204);
  a.post("/api/questions/" + item + "/rating", R"({"stars":6,"session":"s1"})", 422);
  a.post("/api/questions/" + item + "/rating", R"({"stars":"4","session":"s1"})", 422);
  a.post("/api/questions/" + qid + "-999/rating", R"({"stars":4,"session":"s1"})", 404);

  auto ex = a.cli.Get("/api/feedback/export");
  REQUIRE(ex);
  CHECK(ex->status == 200);
  CHECK(ex->get_header_value("Content-Type") == "application/x-ndjson");
  const auto row = ojson::parse(ex->body.substr(0, ex->body.find('\n')));
  CHECK(row["rating"] == 4);
  CHECK(row["question"] == stored.items[0].stem);

  auto short_ex = a.cli.Get("/api/feedback/export?min=5");
  REQUIRE(short_ex);
  CHECK(short_ex->status == 200);
  CHECK(short_ex->has_header("X-Qgen-Warning"));
  a.get("/api/feedback/export?min=abc", 400);

  const auto stats = a.get("/api/feedback/stats", 200);
  CHECK(stats["total"] == 1);
}

TEST_CASE("http: visual items link to their stored image") {
  Api a;
  const std::string doc = a.upload_sample();
  const auto quiz = a.post("/api/documents/" + doc + "/quizzes", R"({"types":{"visual":2},"seed":1})", 200);
  std::size_t linked = 0;
  for (const auto& it : quiz["items"]) {
    if (!it.contains("image_url")) continue;
    ++linked;
    auto img = a.cli.Get(it["image_url"].get<std::string>());
    REQUIRE(img);
    CHECK(img->status == 200);
    CHECK(img->get_header_value("Content-Type") == "image/png");
    CHECK(img->body.substr(1, 3) == "PNG");
  }
  CHECK(linked >= 1);
  CHECK(linked == quiz["items"].size());
  a.get("/api/documents/" + doc + "/images/missing.png", 404);
  a.get("/api/documents/nope/images/x.png", 404);
}

TEST_CASE("http: backend failures map to 502 with the failing op") {
  ServerConfig c;
  c.backend.mode = backend::BackendConfig::Mode::remote;
  c.backend.base_url = "http://127.0.0.1:1";
  c.backend.retries = 0;
  c.backend.timeout_s = 2.0;
  Api a(c);
  const auto up = a.post("/api/documents?format=text", kText, 201);
  const auto err = a.post("/api/documents/" + up["id"].get<std::string>() + "/quizzes",
                          R"({"types":{"mcq":1},"seed":1})", 502);
  CHECK(err["error"]["code"] == "backend_failure");
  CHECK(err["error"]["op"].get<std::string>().size() > 0);
}

TEST_CASE("http: CORS preflight") {
  Api a;
  auto r = a.cli.Options("/api/documents");
  REQUIRE(r);
  CHECK(r->status == 204);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(r->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}
