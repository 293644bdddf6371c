// qgen: batch front end for the question-generation pipeline.
//
// Exit status: 0 success, 1 validation (also not-found, conflict, alignment),
// 2 backend, 3 I/O.

#include "qgen/backend/http.hpp"
#include "qgen/evalkit/report.hpp"
#include "qgen/qforge/generate.hpp"
#include "qgen/server/http_api.hpp"
#include "qgen/server/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using qgen::server::ojson;

namespace {

int exit_code_for(qgen::ErrorKind kind) {
  switch (kind) {
    case qgen::ErrorKind::backend: return 2;
    case qgen::ErrorKind::io: return 3;
    default: return 1;
  }
}

struct Globals {
  std::string store;
  std::string config;
  bool json = false;
};

qgen::server::ServerConfig resolve_config(const Globals& g) {
  qgen::server::ServerConfig cfg =
      qgen::server::load_config(g.config.empty() ? std::nullopt
                                                 : std::optional<fs::path>(g.config));
  if (!g.store.empty()) cfg.store_root = g.store;
  return cfg;
}

void emit(const Globals& g, const ojson& j, const std::string& human) {
  if (g.json) {
    std::cout << j.dump() << "\n";
  } else {
    std::cout << human;
  }
}

int report_error(const Globals& g, qgen::ErrorKind kind, const std::string& message,
                 const ojson& extra = ojson::object()) {
  if (g.json) {
    ojson e;
    e["kind"] = qgen::to_string(kind);
    e["message"] = message;
    for (const auto& [k, v] : extra.items()) e[k] = v;
    ojson j;
    j["error"] = e;
    std::cout << j.dump() << "\n";
  }
  std::cerr << "qgen: " << message << "\n";
  return exit_code_for(kind);
}

std::function<void()> g_stop;

extern "C" void on_signal(int) {
  if (g_stop) g_stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgen: ingest documents, generate quizzes, evaluate runs, collect feedback"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--store", g.store, "Store directory (overrides the config)");
  app.add_option("--config", g.config, "Config file (default: $QGEN_CONFIG)");
  app.add_flag("--json", g.json, "Machine-readable JSON on stdout");

  // ingest
  std::string ingest_path, ingest_format = "detect", ingest_title;
  auto* ingest = app.add_subcommand("ingest", "Chunk a manifest or text file into the store");
  ingest->add_option("path", ingest_path, "Manifest (.jsonl) or plain-text file")->required();
  ingest->add_option("--format", ingest_format, "manifest | text | detect")
      ->check(CLI::IsMember({"manifest", "text", "detect"}));
  ingest->add_option("--title", ingest_title, "Document title");

  // generate
  std::string gen_doc, gen_types = "mcq=2,tf=2,fitb=2,match=1", gen_backend, gen_created_at, gen_out;
  std::uint64_t gen_seed = 0;
  std::optional<std::uint64_t> gen_mock;
  std::optional<std::size_t> gen_K, gen_k;
  int gen_candidates = 1;
  bool gen_reward = false;
  auto* generate = app.add_subcommand("generate", "Generate a quiz for a stored document");
  generate->add_option("docid", gen_doc, "Document id")->required();
  generate->add_option("--types", gen_types, "Counts per type, e.g. mcq=2,tf=2,fitb=2,match=1,visual=1");
  generate->add_option("--seed", gen_seed, "Generation seed");
  auto* backend_opt = generate->add_option("--backend", gen_backend, "Remote backend base URL");
  generate->add_option("--mock", gen_mock, "Use the in-process mock backend with this seed")
      ->excludes(backend_opt);
  generate->add_option("-K,--keyterms", gen_K, "Key terms to extract");
  generate->add_option("-k,--depth", gen_k, "Chunks retrieved per key term");
  generate->add_option("--candidates", gen_candidates, "Candidates per item (reward filter)");
  generate->add_flag("--reward-filter", gen_reward, "Keep the best-scoring candidate per item");
  generate->add_option("--created-at", gen_created_at, "Pin created_at for a new quiz");
  generate->add_option("--out", gen_out, "Also copy the quiz file here");

  // eval
  std::string eval_pred, eval_ref, eval_format, eval_baseline, eval_label = "RL";
  double eval_beta = 1.0;
  auto* eval = app.add_subcommand("eval", "Score predictions against references (BLEU-4, ROUGE-L)");
  eval->add_option("--pred", eval_pred, "Predictions file")->required();
  eval->add_option("--ref", eval_ref, "References file")->required();
  eval->add_option("--format", eval_format, "squad_v1 | boolq_jsonl | pairs_jsonl")
      ->required()
      ->check(CLI::IsMember({"squad_v1", "boolq_jsonl", "pairs_jsonl"}));
  eval->add_option("--baseline", eval_baseline, "Earlier predictions for a before/after report");
  eval->add_option("--label", eval_label, "Suffix for before/after column headings");
  eval->add_option("--beta", eval_beta, "ROUGE-L F beta (1 = F1)")->check(CLI::PositiveNumber);

  // serve
  std::optional<int> serve_port;
  std::string serve_host;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)");
  serve->add_option("--host", serve_host, "Bind address");

  // export-feedback
  std::size_t export_min = 0;
  std::string export_out;
  auto* exportf = app.add_subcommand("export-feedback", "Write reward-model training rows (JSON-Lines)");
  exportf->add_option("--min", export_min, "Warn when fewer records exist");
  exportf->add_option("--out", export_out, "Output file (default stdout)");

  // feedback-stats
  auto* stats = app.add_subcommand("feedback-stats", "Rating histogram and means");

  // mock-backend
  int mock_port = 0;
  std::string mock_host = "127.0.0.1";
  std::uint64_t mock_seed = 0;
  auto* mockb = app.add_subcommand("mock-backend", "Serve the deterministic mock model backend");
  mockb->add_option("--port", mock_port, "Port (0 picks a free one)");
  mockb->add_option("--host", mock_host, "Bind address");
  mockb->add_option("--seed", mock_seed, "Mock seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      qgen::server::Service svc(resolve_config(g));
      const fs::path path(ingest_path);
      const std::string bytes = qgen::chunkstore::read_file(path);
      const auto fmt = qgen::server::upload_format_from_string(ingest_format);
      const std::string title = ingest_title.empty() ? path.stem().string() : ingest_title;
      const auto r = svc.upload(bytes, fmt, title, path.parent_path());
      ojson j;
      j["id"] = r.doc_id;
      j["chunk_count"] = r.chunk_count;
      emit(g, j, r.doc_id + "\t" + std::to_string(r.chunk_count) + " chunks\n");
      return 0;
    }

    if (*generate) {
      qgen::server::ServerConfig cfg = resolve_config(g);
      if (gen_mock) {
        cfg.backend.mode = qgen::backend::BackendConfig::Mode::mock;
        cfg.backend.seed = *gen_mock;
      } else if (!gen_backend.empty()) {
        cfg.backend.mode = qgen::backend::BackendConfig::Mode::remote;
        cfg.backend.base_url = gen_backend;
      }
      qgen::server::Service svc(cfg);
      ojson spec_json;
      ojson types = ojson::object();
      for (const auto& [t, n] : qgen::qforge::parse_type_counts(gen_types)) {
        types[std::string(qgen::qforge::to_string(t))] = n;
      }
      spec_json["types"] = types;
      if (gen_K) spec_json["K"] = *gen_K;
      if (gen_k) spec_json["k"] = *gen_k;
      spec_json["candidates_per_item"] = gen_candidates;
      spec_json["reward_filter"] = gen_reward;
      spec_json["seed"] = gen_seed;
      const auto spec = svc.spec_with_defaults(spec_json);
      const qgen::qforge::Quiz quiz = svc.generate(gen_doc, spec, gen_created_at);
      const fs::path file = svc.quiz_file(quiz);
      if (!gen_out.empty()) qgen::chunkstore::write_file_atomic(gen_out, qgen::qforge::serialize(quiz));

      ojson shortfall = ojson::object();
      std::string human = quiz.id + "\t" + std::to_string(quiz.items.size()) + " items\t" +
                          file.string() + "\n";
      for (const auto& [t, n] : quiz.shortfall) {
        shortfall[std::string(qgen::qforge::to_string(t))] = n;
        human += "shortfall: " + std::string(qgen::qforge::to_string(t)) + " missing " +
                 std::to_string(n) + "\n";
      }
      ojson j;
      j["quiz_id"] = quiz.id;
      j["doc_id"] = quiz.doc_id;
      j["items"] = quiz.items.size();
      j["path"] = file.string();
      j["shortfall"] = shortfall;
      emit(g, j, human);
      return 0;
    }

    if (*eval) {
      const auto fmt = qgen::evalkit::dataset_format_from_string(eval_format);
      const auto refs = qgen::evalkit::load_qa_dataset(eval_ref, fmt);
      const auto preds =
          qgen::evalkit::predictions_from(qgen::evalkit::load_qa_dataset(eval_pred, fmt));
      const auto result = qgen::evalkit::evaluate_run(preds, refs, eval_beta);
      if (eval_baseline.empty()) {
        emit(g, qgen::evalkit::to_json(result), qgen::evalkit::render_table(result));
        return 0;
      }
      const auto base = qgen::evalkit::evaluate_run(
          qgen::evalkit::predictions_from(qgen::evalkit::load_qa_dataset(eval_baseline, fmt)), refs,
          eval_beta);
      emit(g, qgen::evalkit::comparison_json(base, result),
           qgen::evalkit::render_comparison(base, result, eval_label));
      return 0;
    }

    if (*serve) {
      qgen::server::ServerConfig cfg = resolve_config(g);
      if (serve_port) cfg.port = *serve_port;
      if (!serve_host.empty()) cfg.host = serve_host;
      qgen::server::Service svc(cfg);
      qgen::server::HttpApi api(svc);
      const int port = api.bind(cfg.host, cfg.port);
      if (port < 0) throw qgen::IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
      ojson j;
      j["host"] = cfg.host;
      j["port"] = port;
      j["store"] = cfg.store_root.string();
      emit(g, j, "listening on http://" + cfg.host + ":" + std::to_string(port) + "\n");
      std::cout.flush();
      g_stop = [&api] { api.stop(); };
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      api.listen();
      return 0;
    }

    if (*exportf) {
      qgen::server::Service svc(resolve_config(g));
      const auto out = svc.export_feedback(export_min);
      if (out.warning) std::cerr << "qgen: warning: " << *out.warning << "\n";
      if (export_out.empty()) {
        std::cout << out.ndjson;
      } else {
        qgen::chunkstore::write_file_atomic(export_out, out.ndjson);
        ojson j;
        j["path"] = export_out;
        j["count"] = out.count;
        if (out.warning) j["warning"] = *out.warning;
        emit(g, j, std::to_string(out.count) + " rows -> " + export_out + "\n");
      }
      return 0;
    }

    if (*stats) {
      qgen::server::Service svc(resolve_config(g));
      const ojson j = qgen::feedback::to_json(svc.feedback_stats());
      emit(g, j, j.dump(2) + "\n");
      return 0;
    }

    if (*mockb) {
      qgen::backend::MockBackendServer server(mock_seed);
      const int port = server.bind(mock_host, mock_port);
      if (port < 0) throw qgen::IoError("cannot bind " + mock_host + ":" + std::to_string(mock_port));
      ojson j;
      j["host"] = mock_host;
      j["port"] = port;
      emit(g, j, "mock backend on http://" + mock_host + ":" + std::to_string(port) + "\n");
      std::cout.flush();
      g_stop = [&server] { server.stop(); };
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      return 0;
    }
  } catch (const qgen::ConflictError& e) {
    ojson extra;
    extra["id"] = e.existing_id();
    return report_error(g, e.kind(), e.what(), extra);
  } catch (const qgen::IngestError& e) {
    ojson extra = ojson::object();
    if (e.record_index()) extra["record"] = *e.record_index();
    if (e.byte_offset()) extra["byte_offset"] = *e.byte_offset();
    return report_error(g, e.kind(), e.what(), extra);
  } catch (const qgen::backend::BackendError& e) {
    ojson extra;
    extra["op"] = e.op();
    return report_error(g, qgen::ErrorKind::backend, e.what(), extra);
  } catch (const qgen::Error& e) {
    return report_error(g, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(g, qgen::ErrorKind::io, e.what());
  } catch (const std::exception& e) {
    return report_error(g, qgen::ErrorKind::validation, e.what());
  }
  return 1;
}
