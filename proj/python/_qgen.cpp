// Python bindings. Structured values cross the boundary as JSON text; the
// qgen package decodes them into dicts and lists.

#include "qgen/backend/mock.hpp"
#include "qgen/chunkstore/ingest.hpp"
#include "qgen/evalkit/report.hpp"
#include "qgen/keyterm/tfidf.hpp"
#include "qgen/server/service.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using qgen::server::ojson;

namespace {

std::string metric_json(const qgen::evalkit::MetricReport& r) {
  return qgen::evalkit::to_json(r).dump();
}

std::vector<std::pair<std::string, double>> keyterms(const std::vector<std::string>& texts,
                                                     std::size_t k) {
  std::vector<qgen::chunkstore::Chunk> chunks;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    qgen::chunkstore::Chunk c;
    c.id = "c" + std::to_string(i);
    c.ordinal = i;
    c.text = texts[i];
    chunks.push_back(std::move(c));
  }
  const auto model = qgen::keyterm::build_tfidf(chunks);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& kt : qgen::keyterm::extract_keyterms(model, k)) out.emplace_back(kt.term, kt.score);
  return out;
}

class PyService {
 public:
  explicit PyService(const std::string& config_json)
      : svc_(qgen::server::config_from_json(
            config_json.empty() ? ojson::object() : ojson::parse(config_json))) {}

  std::string upload(const py::bytes& body, const std::string& format, const std::string& title) {
    const std::string bytes = body;
    py::gil_scoped_release nogil;
    const auto r = svc_.upload(bytes, qgen::server::upload_format_from_string(format), title);
    ojson j;
    j["id"] = r.doc_id;
    j["chunk_count"] = r.chunk_count;
    return j.dump();
  }

  std::string generate(const std::string& doc_id, const std::string& spec_json,
                       const std::string& created_at) {
    py::gil_scoped_release nogil;
    const auto spec = svc_.spec_with_defaults(spec_json.empty() ? ojson::object()
                                                                : ojson::parse(spec_json));
    return qgen::qforge::to_json(svc_.generate(doc_id, spec, created_at)).dump();
  }

  std::string get_quiz(const std::string& quiz_id, bool include_keys) {
    return qgen::qforge::to_json(svc_.get_quiz(quiz_id), include_keys).dump();
  }

  std::string submit(const std::string& quiz_id, const std::string& answers_json) {
    return qgen::server::to_json(svc_.submit(quiz_id, ojson::parse(answers_json))).dump();
  }

  std::string rate(const std::string& question_id, int stars, const std::string& session) {
    return qgen::feedback::to_json(svc_.rate(question_id, stars, session)).dump();
  }

  std::pair<std::string, std::optional<std::string>> export_feedback(std::size_t min_records) {
    auto r = svc_.export_feedback(min_records);
    return {std::move(r.ndjson), std::move(r.warning)};
  }

  std::string feedback_stats() { return qgen::feedback::to_json(svc_.feedback_stats()).dump(); }

 private:
  qgen::server::Service svc_;
};

}  // namespace

PYBIND11_MODULE(_qgen, m) {
  m.doc() = "Question-generation pipeline core";

  auto base = py::register_exception<qgen::Error>(m, "QgenError", PyExc_RuntimeError);
  py::register_exception<qgen::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<qgen::NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<qgen::ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<qgen::IoError>(m, "IoError", base.ptr());
  py::register_exception<qgen::backend::BackendError>(m, "BackendError", base.ptr());

  m.def("clean_text", &qgen::chunkstore::clean_text, py::arg("raw"));
  m.def("segment_sentences",
        [](const std::string& t) { return qgen::chunkstore::segment_sentences(t); }, py::arg("text"));
  m.def("keyterms", &keyterms, py::arg("texts"), py::arg("k") = 10,
        "Top-k key terms over the given chunk texts as (term, score) pairs.");

  m.def("tokenize_eval", &qgen::evalkit::tokenize_eval, py::arg("text"));
  m.def(
      "bleu4_json",
      [](const std::vector<std::string>& c, const std::vector<std::string>& r) {
        return metric_json(qgen::evalkit::score_corpus(c, r));
      },
      py::arg("candidates"), py::arg("references"));
  m.def(
      "rouge_l",
      [](const std::string& c, const std::string& r, double beta) {
        const auto s = qgen::evalkit::rouge_l(c, r, beta);
        return std::make_tuple(s.precision, s.recall, s.f);
      },
      py::arg("candidate"), py::arg("reference"), py::arg("beta") = 1.0);

  m.def("vqg_prompts", [] {
    const auto& p = qgen::backend::vqg_prompts();
    return std::map<std::string, std::string>{
        {"describe", p.describe}, {"ask", p.ask}, {"answer", p.answer_mode}};
  });
  m.def(
      "mock_respond_json",
      [](const std::string& op, const std::string& payload, std::uint64_t seed) {
        return qgen::backend::mock_respond(op, qgen::backend::json::parse(payload), seed).dump();
      },
      py::arg("op"), py::arg("payload"), py::arg("seed") = 0);

  py::class_<PyService>(m, "_Service")
      .def(py::init<const std::string&>(), py::arg("config_json") = "")
      .def("upload", &PyService::upload)
      .def("generate", &PyService::generate)
      .def("get_quiz", &PyService::get_quiz)
      .def("submit", &PyService::submit)
      .def("rate", &PyService::rate)
      .def("export_feedback", &PyService::export_feedback)
      .def("feedback_stats", &PyService::feedback_stats);
}
