#include "qgen/server/config.hpp"

#include "qgen/chunkstore/store.hpp"
#include "qgen/common/error.hpp"

#include <cstdlib>

namespace qgen::server {

namespace fs = std::filesystem;

void ServerConfig::validate() const {
  backend.validate();
  if (store_root.empty()) throw ValidationError("config: store path is empty");
  if (port < 0 || port > 65535) throw ValidationError("config: port out of range");
  if (default_K < 1 || default_k < 1) throw ValidationError("config: K and k must be >= 1");
  if (chunking.target_words < 1) throw ValidationError("config: chunk_words must be >= 1");
  if (chunking.overlap_sentences < 0) throw ValidationError("config: overlap_sentences must be >= 0");
}

ServerConfig config_from_json(const ojson& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  ServerConfig c;
  try {
    if (j.contains("store")) c.store_root = resolve(j["store"].get<std::string>());
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("backend")) {
      const ojson& b = j["backend"];
      const std::string mode = b.value("mode", "mock");
      if (mode == "mock") {
        c.backend.mode = backend::BackendConfig::Mode::mock;
      } else if (mode == "remote") {
        c.backend.mode = backend::BackendConfig::Mode::remote;
      } else {
        throw ValidationError("config: backend.mode must be 'mock' or 'remote'");
      }
      c.backend.base_url = b.value("url", c.backend.base_url);
      c.backend.seed = b.value("seed", c.backend.seed);
      c.backend.timeout_s = b.value("timeout_s", c.backend.timeout_s);
      c.backend.retries = b.value("retries", c.backend.retries);
      c.backend.backoff_base_s = b.value("backoff_base_s", c.backend.backoff_base_s);
      c.backend_embeddings = b.value("embeddings", c.backend_embeddings);
    }
    if (j.contains("defaults")) {
      const ojson& d = j["defaults"];
      c.default_K = d.value("K", c.default_K);
      c.default_k = d.value("k", c.default_k);
      c.chunking.target_words = d.value("chunk_words", c.chunking.target_words);
      c.chunking.overlap_sentences = d.value("overlap_sentences", c.chunking.overlap_sentences);
    }
    if (j.contains("stopwords")) c.stopwords_path = resolve(j["stopwords"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ojson to_json(const ServerConfig& c) {
  ojson j;
  j["store"] = c.store_root.string();
  j["host"] = c.host;
  j["port"] = c.port;
  j["backend"] = {
      {"mode", c.backend.mode == backend::BackendConfig::Mode::mock ? "mock" : "remote"},
      {"url", c.backend.base_url},
      {"seed", c.backend.seed},
      {"timeout_s", c.backend.timeout_s},
      {"retries", c.backend.retries},
      {"backoff_base_s", c.backend.backoff_base_s},
      {"embeddings", c.backend_embeddings}};
  j["defaults"] = {{"K", c.default_K},
                   {"k", c.default_k},
                   {"chunk_words", c.chunking.target_words},
                   {"overlap_sentences", c.chunking.overlap_sentences}};
  if (c.stopwords_path) j["stopwords"] = c.stopwords_path->string();
  return j;
}

ServerConfig load_config(const std::optional<fs::path>& path) {
  std::optional<fs::path> chosen = path;
  if (!chosen || chosen->empty()) {
    if (const char* env = std::getenv("QGEN_CONFIG"); env && *env) chosen = fs::path(env);
  }
  if (!chosen || chosen->empty()) return ServerConfig{};
  const std::string bytes = chunkstore::read_file(*chosen);
  ojson j;
  try {
    j = ojson::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(chosen->string() + ": " + e.what());
  }
  return config_from_json(j, chosen->parent_path());
}

}  // namespace qgen::server
